#include <gtest/gtest.h>

#include "predsim/kernel.hpp"

using namespace predsim;

namespace {

// Test-side oracle, independent of the library: plain triple loop over int64
// with a single wrap at the end.
Matrix oracle_matmul(const Matrix& a, const Matrix& b, std::uint64_t acc_bits) {
  Matrix out(a.rows, b.cols);
  for (std::uint32_t r = 0; r < a.rows; ++r)
    for (std::uint32_t c = 0; c < b.cols; ++c) {
      std::int64_t sum = 0;
      for (std::uint32_t k = 0; k < a.cols; ++k) sum += a.at(r, k) * b.at(k, c);
      out.at(r, c) = wrap_to_bits(sum, acc_bits);
    }
  return out;
}

ArchConfig vector_config(std::uint64_t vreg_bits, std::uint64_t mult_bits) {
  ArchConfig c;
  c.name = "test";
  c.vreg_bits = vreg_bits;
  c.mult_bits = mult_bits;
  c.data_spm_bytes = 1 * kMiB;
  c.spm_port_bytes_per_cycle = 0;  // default: mult_bits/8
  validate(c);
  return c;
}

}  // namespace

TEST(KernelExec, OneByOne) {
  Matrix a(1, 1), b(1, 1);
  a.at(0, 0) = 3;
  b.at(0, 0) = 4;
  const Matrix c = kernel_exec(a, b, 8, 32);
  EXPECT_EQ(c.at(0, 0), 12);
}

TEST(KernelExec, IdentityPassesThrough) {
  Matrix eye(4, 4);
  for (std::uint32_t i = 0; i < 4; ++i) eye.at(i, i) = 1;
  const Matrix b = random_matrix(4, 4, 8, 77);
  EXPECT_EQ(kernel_exec(eye, b, 8, 32), b);
}

TEST(KernelExec, MatchesOracleOnRandomInt8) {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 40ull, 500ull}) {
    const Matrix a = random_matrix(16, 16, 8, seed);
    const Matrix b = random_matrix(16, 16, 8, seed + 1000);
    EXPECT_EQ(kernel_exec(a, b, 8, 32), oracle_matmul(a, b, 32)) << seed;
  }
}

TEST(KernelExec, MatchesOracleUnderAccumulatorWrap) {
  // 8-bit accumulation wraps constantly; modular arithmetic keeps the chunked
  // vector accumulation and the wide scalar sum in agreement.
  const Matrix a = random_matrix(8, 32, 8, 9);
  const Matrix b = random_matrix(32, 8, 8, 10);
  EXPECT_EQ(kernel_exec(a, b, 8, 8), oracle_matmul(a, b, 8));
}

TEST(KernelExec, ChunkingDoesNotChangeResults) {
  const Matrix a = random_matrix(5, 23, 8, 3);
  const Matrix b = random_matrix(23, 9, 8, 4);
  const Matrix lanes1 = kernel_exec(a, b, 8, 32, 1);
  for (std::uint32_t lanes : {2u, 16u, 64u, 1024u})
    EXPECT_EQ(kernel_exec(a, b, 8, 32, lanes), lanes1) << lanes;
}

TEST(KernelExec, RejectsBadInputs) {
  const Matrix a = random_matrix(4, 8, 8, 1);
  const Matrix b = random_matrix(7, 4, 8, 2);  // inner dim mismatch
  EXPECT_THROW(kernel_exec(a, b, 8, 32), std::invalid_argument);

  Matrix wide(1, 1);
  wide.at(0, 0) = 200;  // not an int8 value
  Matrix one(1, 1);
  one.at(0, 0) = 1;
  EXPECT_THROW(kernel_exec(wide, one, 8, 32), std::invalid_argument);
}

TEST(KernelCycles, SingleVectorCase) {
  // vreg 256 / element 8: one register holds 32 elements, the multiplier
  // chews a register in 2 chunks.
  const ArchConfig cfg = preset("Octa");
  const KernelTask t{1, 1, 32, 8, 32};
  const Cycles vec = 1 * (256 / 128 + cfg.kernel_per_op_overhead);  // 3
  const Cycles reduce = 5;                                          // log2(32)
  const Cycles loadstore = ceil_div(2 * 32 * 1 + 4, cfg.spm_port());
  EXPECT_EQ(kernel_cycles(t, cfg),
            cfg.kernel_startup_cycles + vec + reduce + loadstore);
}

TEST(KernelCycles, FormulaInstantiationLargeN) {
  // N = 1024 on vreg 256 / mult 128: 32 vector ops per output, 2-chunk
  // register drain, 3 cycles per vector op.
  const ArchConfig cfg = preset("Octa");
  const KernelTask t{1, 1, 1024, 8, 32};
  const Cycles expected =
      cfg.kernel_startup_cycles +
      32 * 3 + 5 + ceil_div(2 * 1024 + 4, cfg.spm_port());
  EXPECT_EQ(kernel_cycles(t, cfg), expected);
}

TEST(KernelCycles, MonotoneInEveryDimension) {
  const ArchConfig cfg = preset("Quad");
  Cycles prev = 0;
  for (std::uint32_t rows : {1u, 2u, 5u, 16u}) {
    const Cycles c = kernel_cycles({rows, 3, 100, 8, 32}, cfg);
    EXPECT_GE(c, prev);
    prev = c;
  }
  prev = 0;
  for (std::uint32_t bw : {1u, 4u, 9u, 64u}) {
    const Cycles c = kernel_cycles({3, bw, 100, 8, 32}, cfg);
    EXPECT_GE(c, prev);
    prev = c;
  }
  prev = 0;
  for (std::uint32_t n : {1u, 63u, 64u, 65u, 1024u}) {
    const Cycles c = kernel_cycles({3, 3, n, 8, 32}, cfg);
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(KernelCycles, PerCoreScalingFollowsMacWidth) {
  // Same work on a Dual-style and an Octa-style core (ports at the default
  // operand-chunk width): cycles scale close to the 4x multiplier ratio once
  // N is much larger than a register.
  const ArchConfig dual_core = vector_config(1024, 512);
  const ArchConfig octa_core = vector_config(256, 128);
  const KernelTask work{4, 16, 4096, 8, 32};
  const double ratio =
      static_cast<double>(kernel_cycles(work, octa_core)) /
      static_cast<double>(kernel_cycles(work, dual_core));
  EXPECT_NEAR(ratio, 4.0, 0.4);
}

TEST(KernelCycles, RejectsDegenerateTasks) {
  const ArchConfig cfg = preset("Octa");
  EXPECT_THROW(kernel_cycles({0, 1, 1, 8, 32}, cfg), std::invalid_argument);
  EXPECT_THROW(kernel_cycles({1, 0, 1, 8, 32}, cfg), std::invalid_argument);
  EXPECT_THROW(kernel_cycles({1, 1, 0, 8, 32}, cfg), std::invalid_argument);
}

TEST(KernelSeparation, TimingIgnoresValuesAndExecIgnoresTiming) {
  // kernel_cycles takes no matrix and kernel_exec takes no config; feed the
  // same shapes with different data and different timing knobs to make the
  // separation observable.
  ArchConfig cfg = preset("Octa");
  const KernelTask t{4, 4, 64, 8, 32};
  const Cycles before = kernel_cycles(t, cfg);

  const Matrix a1 = random_matrix(4, 64, 8, 1), b1 = random_matrix(64, 4, 8, 2);
  const Matrix a2 = random_matrix(4, 64, 8, 3), b2 = random_matrix(64, 4, 8, 4);
  EXPECT_EQ(kernel_cycles(t, cfg), before);  // unchanged by any data above

  cfg.kernel_startup_cycles += 1000;
  EXPECT_EQ(kernel_exec(a1, b1, 8, 32), oracle_matmul(a1, b1, 32));
  EXPECT_EQ(kernel_exec(a2, b2, 8, 32), oracle_matmul(a2, b2, 32));
  EXPECT_EQ(kernel_cycles(t, cfg), before + 1000);
}
