#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace elts;
using namespace testsupport;

namespace {
SystemRegistry qubits3() { return {{"q1", 2}, {"q2", 2}, {"q3", 2}}; }
}  // namespace

TEST_CASE("effect and density validation") {
  CHECK(validate_effect(projp()));
  CHECK(validate_density(projp()));  // rank-1 projector of unit trace
  CHECK(!validate_effect(2.0 * id2()));
  CHECK(!validate_density(id2()));  // trace 2

  // trace 1, determinant 0.6*0.4-0.04 = 0.2 > 0: a valid mixed state
  Matrix rho(2, 2);
  rho << 0.6, 0.2, 0.2, 0.4;
  CHECK(0.6 * 0.4 - 0.2 * 0.2 == doctest::Approx(0.2));
  CHECK(validate_density(rho));

  Matrix skew(2, 2);
  skew << 1.0, Complex(0, 1), Complex(0, 1), 0.0;  // not Hermitian
  CHECK(!validate_effect(skew));
}

TEST_CASE("born rule golden values") {
  SystemCollection q1({{"q1", 2}}, {"q1"});
  DensityOperator rho0(q1, proj0());
  CHECK(born(proj0(), rho0) == Rational(1));
  DensityOperator rho_plus(q1, projp());
  CHECK(born(proj0(), rho_plus) == Rational(1, 2));
  CHECK(born(Matrix::Zero(2, 2), rho0) == Rational(0));
  CHECK_THROWS_AS(born(Matrix::Identity(4, 4), rho0), Error);
}

TEST_CASE("born rationalization bound") {
  SystemCollection q1({{"q1", 2}}, {"q1"});
  Matrix rho(2, 2);
  rho << 0.3, 0.1, 0.1, 0.7;
  DensityOperator d(q1, rho);
  BornOptions bounded;
  bounded.max_denominator = 1000;
  Rational r = born(projp(), d, bounded);
  CHECK(denominator(r) <= Integer(1000));
  CHECK(std::abs(to_double(r) - born_real(projp(), d)) < 1e-3);
  // exact dyadic by default
  Rational exact = born(projp(), d);
  CHECK(to_double(exact) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("sort permutation by digit rearrangement") {
  SystemRegistry reg = qubits3();
  SUBCASE("already sorted: identity") {
    Matrix p = sort_permutation(SystemCollection(reg, {"q1"}), SystemCollection(reg, {"q2"}));
    CHECK(matrix_equal(p, Matrix::Identity(4, 4), 0.0));
  }
  SUBCASE("swapped qubits: the SWAP permutation") {
    Matrix p = sort_permutation(SystemCollection(reg, {"q2"}), SystemCollection(reg, {"q1"}));
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = 1.0;
    swap(1, 2) = swap(2, 1) = 1.0;
    CHECK(matrix_equal(p, swap, 0.0));
  }
  SUBCASE("middle insertion: C={q1,q3}, D={q2}") {
    // oracle: enumerate the 8 basis indices; source digits (b1,b3,b2) map to
    // target (b1,b2,b3), so s = 4b1+2b3+b2 goes to t = 4b1+2b2+b3.
    std::vector<long> expected(8);
    for (long b1 = 0; b1 < 2; ++b1)
      for (long b3 = 0; b3 < 2; ++b3)
        for (long b2 = 0; b2 < 2; ++b2) expected[4 * b1 + 2 * b3 + b2] = 4 * b1 + 2 * b2 + b3;
    CHECK(expected == std::vector<long>{0, 2, 1, 3, 4, 6, 5, 7});
    auto perm = sort_permutation_vector(SystemCollection(reg, {"q1", "q3"}),
                                        SystemCollection(reg, {"q2"}));
    CHECK(perm == expected);
  }
  CHECK_THROWS_AS(
      sort_permutation(SystemCollection(reg, {"q1"}), SystemCollection(reg, {"q1"})),
      GradeClashError);
}

TEST_CASE("sorted Kronecker product") {
  SystemRegistry reg = qubits3();
  SystemCollection q1(reg, {"q1"}), q2(reg, {"q2"});
  SUBCASE("sorted order is the plain Kronecker product") {
    Matrix out = sorted_kron(q1, proj0(), q2, proj1());
    CHECK(matrix_equal(out, kron(proj0(), proj1()), 0.0));
  }
  SUBCASE("reversed grades exchange the factors") {
    Rng rng(3);
    Matrix a = gen::effect(rng, 2), b = gen::effect(rng, 2);
    Matrix out = sorted_kron(q2, a, q1, b);
    CHECK(matrix_equal(out, kron(b, a), 1e-15));
  }
}

TEST_CASE("partial trace") {
  SystemRegistry reg = qubits3();
  SystemCollection q12(reg, {"q1", "q2"});
  SystemCollection q1(reg, {"q1"}), q2(reg, {"q2"});

  SUBCASE("product-state rule") {
    Matrix m = kron(proj0(), proj1());  // |01><01|
    CHECK(matrix_equal(partial_trace(q12, m, q2), proj0(), 0.0));
  }
  SUBCASE("Bell state reduces to the maximally mixed state") {
    // oracle: |Phi+><Phi+| = 1/2 [[1,0,0,1],[0,0,0,0],[0,0,0,0],[1,0,0,1]];
    // summing the two diagonal 2x2 blocks gives I/2.
    Matrix bell = *named_matrix("bell_phi_plus");
    CHECK(matrix_equal(partial_trace(q12, bell, q1), 0.5 * id2(), 0.0));
    CHECK(matrix_equal(partial_trace(q12, bell, q2), 0.5 * id2(), 0.0));
  }
  SUBCASE("empty trace is the identity map") {
    Rng rng(4);
    Matrix m = gen::effect(rng, 4);
    CHECK(matrix_equal(partial_trace(q12, m, SystemCollection::empty(reg)), m, 0.0));
  }
  SUBCASE("not a subset") {
    CHECK_THROWS_AS(partial_trace(q1, proj0(), q2), Error);
  }
}

TEST_CASE("distinguishing density") {
  SystemCollection q1({{"q1", 2}}, {"q1"});
  SUBCASE("the four projectors are separated; the demo density works") {
    // oracle traces against rho = [[0.6,0.2],[0.2,0.4]]: 0.6, 0.4, 0.7, 0.3
    Matrix rho(2, 2);
    rho << 0.6, 0.2, 0.2, 0.4;
    DensityOperator d(q1, rho);
    CHECK(born_real(proj0(), d) == doctest::Approx(0.6));
    CHECK(born_real(proj1(), d) == doctest::Approx(0.4));
    CHECK(born_real(projp(), d) == doctest::Approx(0.7));
    CHECK(born_real(projm(), d) == doctest::Approx(0.3));

    DistinguishOptions opts;
    opts.seed = 17;
    auto r = distinguishing_density({proj0(), proj1(), projp(), projm()}, q1, opts);
    CHECK(r.min_gap > opts.sep_tol);
    CHECK(validate_density(r.rho.matrix));
  }
  SUBCASE("a singleton set needs no separation") {
    auto r = distinguishing_density({id2()}, q1, {});
    CHECK(validate_density(r.rho.matrix));
  }
  SUBCASE("indistinct effects are rejected") {
    CHECK_THROWS_WITH_AS(distinguishing_density({proj0(), proj0()}, q1, {}),
                         doctest::Contains("indistinct"), Error);
  }
}

TEST_CASE("randomized quantum properties") {
  LawConfig cfg;
  cfg.seed = 23;
  cfg.samples = 120;
  cfg.tol = 1e-9;
  for (const auto& r : quantum_laws(cfg)) {
    INFO(r.name, ": ", r.note);
    CHECK(r.pass);
  }
}

TEST_CASE("the corrupt-sort hook makes commutativity fail") {
  LawConfig cfg;
  cfg.seed = 23;
  cfg.samples = 10;
  cfg.corrupt_sort = true;
  bool commutes_failed = false;
  for (const auto& r : quantum_laws(cfg))
    if (r.name == "quantum/boxtimes-commutes") commutes_failed = !r.pass;
  CHECK(commutes_failed);
}
