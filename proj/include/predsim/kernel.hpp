#pragma once

// Functional and timing model of the vectorized matrix-multiplication kernel
// run by one worker core on scratchpad-resident data. The two halves are kept
// strictly apart: kernel_exec never sees a timing parameter, kernel_cycles
// never sees a matrix value.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "predsim/config.hpp"

namespace predsim {

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

// Dense row-major integer matrix. Values are kept in int64 regardless of the
// modeled element width; width enforcement happens at the kernel boundary.
struct Matrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::int64_t> data;

  Matrix() = default;
  Matrix(std::uint32_t r, std::uint32_t c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

  std::int64_t& at(std::uint32_t r, std::uint32_t c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  std::int64_t at(std::uint32_t r, std::uint32_t c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  Matrix slice(std::uint32_t r0, std::uint32_t nr, std::uint32_t c0,
               std::uint32_t nc) const {
    Matrix out(nr, nc);
    for (std::uint32_t r = 0; r < nr; ++r)
      for (std::uint32_t c = 0; c < nc; ++c)
        out.at(r, c) = at(r0 + r, c0 + c);
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// Two's-complement wrap of v to the low `bits` bits.
inline std::int64_t wrap_to_bits(std::int64_t v, std::uint64_t bits) {
  if (bits >= 64) return v;
  std::uint64_t u = static_cast<std::uint64_t>(v) & ((1ull << bits) - 1);
  if (u & (1ull << (bits - 1))) u |= ~((1ull << bits) - 1);
  return static_cast<std::int64_t>(u);
}

inline bool fits_in_bits(std::int64_t v, std::uint64_t bits) {
  return wrap_to_bits(v, bits) == v;
}

// Deterministic test/workload matrix with entries spanning the signed range
// of `element_bits`.
inline Matrix random_matrix(std::uint32_t rows, std::uint32_t cols,
                            std::uint64_t element_bits, std::uint64_t seed) {
  Matrix m(rows, cols);
  JitterRng rng(seed);
  const std::uint64_t span = 1ull << element_bits;
  const std::int64_t lo = -(1ll << (element_bits - 1));
  for (auto& v : m.data)
    v = lo + static_cast<std::int64_t>(rng.bounded_inclusive(span - 1));
  return m;
}

// ---------------------------------------------------------------------------
// Functional kernel
// ---------------------------------------------------------------------------

// a_rows (rows x N) times b_block (N x Bw), accumulating the way the vector
// unit does: per-lane partial sums over register-sized chunks, wrapped to
// acc_bits at every step, then a horizontal reduce. Modular arithmetic makes
// the result independent of the chunking, which is what the scalar reference
// cross-check relies on.
inline Matrix kernel_exec(const Matrix& a_rows, const Matrix& b_block,
                          std::uint64_t element_bits, std::uint64_t acc_bits,
                          std::uint32_t lanes = 16) {
  if (a_rows.cols != b_block.rows)
    throw std::invalid_argument("kernel_exec: shape mismatch (" +
                                std::to_string(a_rows.cols) + " vs " +
                                std::to_string(b_block.rows) + ")");
  if (lanes == 0) throw std::invalid_argument("kernel_exec: zero lanes");
  for (const Matrix* m : {&a_rows, &b_block})
    for (std::int64_t v : m->data)
      if (!fits_in_bits(v, element_bits))
        throw std::invalid_argument(
            "kernel_exec: operand value " + std::to_string(v) +
            " not representable in " + std::to_string(element_bits) + " bits");

  const std::uint32_t n = a_rows.cols;
  Matrix out(a_rows.rows, b_block.cols);
  std::vector<std::int64_t> lane_acc(lanes);
  for (std::uint32_t r = 0; r < out.rows; ++r) {
    for (std::uint32_t c = 0; c < out.cols; ++c) {
      for (auto& acc : lane_acc) acc = 0;
      for (std::uint32_t k = 0; k < n; ++k) {
        auto& acc = lane_acc[k % lanes];
        acc = wrap_to_bits(acc + wrap_to_bits(a_rows.at(r, k) * b_block.at(k, c),
                                              acc_bits),
                           acc_bits);
      }
      std::int64_t sum = 0;
      for (std::int64_t acc : lane_acc) sum = wrap_to_bits(sum + acc, acc_bits);
      out.at(r, c) = sum;
    }
  }
  return out;
}

// Plain scalar triple loop, full int64 products summed and wrapped once.
// Deliberately a different evaluation route from kernel_exec; used by the
// functional self-check in the CLI.
inline Matrix reference_matmul(const Matrix& a, const Matrix& b,
                               std::uint64_t acc_bits) {
  if (a.cols != b.rows)
    throw std::invalid_argument("reference_matmul: shape mismatch");
  Matrix out(a.rows, b.cols);
  for (std::uint32_t r = 0; r < a.rows; ++r)
    for (std::uint32_t c = 0; c < b.cols; ++c) {
      std::int64_t sum = 0;
      for (std::uint32_t k = 0; k < a.cols; ++k) sum += a.at(r, k) * b.at(k, c);
      out.at(r, c) = wrap_to_bits(sum, acc_bits);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Timing kernel
// ---------------------------------------------------------------------------

// One kernel invocation: `rows` A-rows against a resident B-block of width
// `block_width` over shared dimension `inner_dim`.
struct KernelTask {
  std::uint32_t rows = 1;
  std::uint32_t block_width = 1;
  std::uint32_t inner_dim = 1;
  std::uint64_t element_bits = 8;
  std::uint64_t acc_bits = 32;

  friend bool operator==(const KernelTask&, const KernelTask&) = default;
};

inline void validate(const KernelTask& t) {
  if (t.rows < 1 || t.block_width < 1 || t.inner_dim < 1)
    throw std::invalid_argument("kernel task dimensions must be >= 1");
}

inline ByteCount kernel_output_bytes(const KernelTask& t) {
  return static_cast<ByteCount>(t.rows) * t.block_width * (t.acc_bits / 8);
}

// Data-independent cycle count for one invocation. Per output element: the
// dot product is chunked into register-sized vector ops, horizontally reduced
// as a tree, and its operand/result traffic streams through the scratchpad
// port.
inline Cycles kernel_cycles(const KernelTask& t, const ArchConfig& cfg) {
  validate(t);
  const std::uint64_t elems_per_vreg = cfg.vreg_bits / t.element_bits;
  const std::uint64_t vec_ops_per_output = ceil_div(t.inner_dim, elems_per_vreg);
  const Cycles cycles_per_vec_op =
      cfg.vreg_bits / cfg.mult_bits + cfg.kernel_per_op_overhead;
  const Cycles reduce_cycles =
      cfg.kernel_reduce_cycles >= 0
          ? static_cast<Cycles>(cfg.kernel_reduce_cycles)
          : static_cast<Cycles>(std::countr_zero(elems_per_vreg));
  const ByteCount traffic_bytes =
      2 * static_cast<ByteCount>(t.inner_dim) * (t.element_bits / 8) +
      t.acc_bits / 8;
  const Cycles loadstore_cycles = ceil_div(traffic_bytes, cfg.spm_port());
  const Cycles per_output =
      vec_ops_per_output * cycles_per_vec_op + reduce_cycles + loadstore_cycles;
  return cfg.kernel_startup_cycles +
         static_cast<Cycles>(t.rows) * t.block_width * per_output;
}

}  // namespace predsim
