#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "pmm/model.hpp"
#include "pmm/model_zoo.hpp"

using namespace pmm;

TEST_CASE("decimal and fraction parsing is exact") {
  CHECK(parse_rational("0.6875") == Rational(11, 16));
  CHECK(parse_rational("11/14") == Rational(11, 14));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("-2.5e+1") == Rational(-25));
  CHECK(parse_rational("0") == Rational(0));
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK(to_string(Rational(11, 16)) == "11/16");
}

TEST_CASE("tracking-majority model loads with the full joint kernel") {
  const Model m = load_model_file(std::string(PMM_MODELS_DIR) + "/no_stabilize.json");
  REQUIRE(m.family() == Model::Family::GenericDiscrete);
  const auto& g = m.as_generic();
  CHECK(g.num_symbols == 2);
  CHECK(g.num_states == 6);
  const int nz = 12;
  REQUIRE(static_cast<int>(g.kernel.size()) == nz * nz);

  // parameter chain 1/8 < 3/16 < 1/2 < 11/16 < 1
  CHECK(m.kernel_exact(1, 1, 1, 1) == Rational(11, 16));
  CHECK(m.kernel_exact(1, 1, 2, 1) == Rational(3, 16));
  CHECK(m.kernel_exact(1, 1, 1, 2) == Rational(0));
  CHECK(m.kernel_exact(1, 1, 1, 3) == Rational(1, 64));  // eps^2
  CHECK(m.kernel_exact(1, 3, 1, 4) == Rational(1, 8));   // eps
  CHECK(m.kernel_exact(1, 3, 1, 1) == Rational(0));
  CHECK(m.initial_exact(1, 1) == Rational(1, 4));
  CHECK(m.initial_exact(1, 3) == Rational(0));

  // exact row-stochasticity of every kernel row
  for (int zp = 0; zp < nz; ++zp) {
    Rational sum(0);
    for (int z = 0; z < nz; ++z) sum += g.kernel[static_cast<std::size_t>(zp) * nz + z];
    CHECK(sum == Rational(1));
  }

  // builder and document agree entry for entry
  const Model built = no_stabilize_model();
  CHECK(built.as_generic().kernel == g.kernel);
  CHECK(built.as_generic().initial == g.initial);
}

TEST_CASE("row-sum violations are reported with the offending row") {
  const std::string doc = R"({
    "type": "hmm", "num_states": 2,
    "transitions": [["0.5","0.4"],["0.5","0.5"]],
    "emissions": {"kind":"discrete","num_symbols":2,"probs":[["0.5","0.5"],["0.5","0.5"]]},
    "initial_hidden": ["0.5","0.5"]
  })";
  CHECK_THROWS_WITH_AS(load_model(doc), doctest::Contains("transition row 1"), ModelError);
}

TEST_CASE("non-positive-definite covariance is rejected") {
  const std::string doc = R"({
    "type": "gaussian_linear_switching", "num_states": 1,
    "transitions": [["1"]],
    "coefficients": [[[0.0, 0.0],[0.0, 0.0]]],
    "noise_means": [[0.0, 0.0]],
    "noise_covariances": [[[1.0, 2.0],[2.0, 1.0]]],
    "initial": {"hidden": ["1"]}
  })";
  CHECK_THROWS_WITH_AS(load_model(doc), doctest::Contains("positive definite"), ModelError);
}

TEST_CASE("schema violations are model errors") {
  CHECK_THROWS_AS(load_model("{"), ModelError);
  CHECK_THROWS_AS(load_model(R"({"type":"unknown_kind"})"), ModelError);
  CHECK_THROWS_AS(load_model(R"({"type":"hmm","num_states":2})"), ModelError);
}

TEST_CASE("two-state construction reproduces the parameterized kernel") {
  const Model m = two_state_pmm_recipe();
  const auto& g = m.as_generic();
  const std::vector<Rational> expect_row11 = {Rational(2, 5), Rational(1, 10), Rational(1, 10),
                                              Rational(2, 5)};
  const std::vector<Rational> expect_row12 = {Rational(3, 20), Rational(7, 20), Rational(7, 20),
                                              Rational(3, 20)};
  for (int z = 0; z < 4; ++z) {
    CHECK(g.kernel[z] == expect_row11[z]);
    CHECK(g.kernel[4 + z] == expect_row12[z]);
  }
  for (int row = 0; row < 4; ++row) {
    Rational sum(0);
    for (int z = 0; z < 4; ++z) sum += g.kernel[static_cast<std::size_t>(row) * 4 + z];
    CHECK(sum == Rational(1));  // exact for rational inputs
  }
}

TEST_CASE("two-state construction with matched parameters factorizes") {
  // lambda1 = mu1 = p and lambda2 = mu2 = q make the two coordinates
  // independent chains with the same marginal transition matrix
  TwoStatePmmParams prm;
  prm.p = Rational(1, 2);
  prm.q = Rational(1, 2);
  prm.lambda1 = prm.p;
  prm.lambda2 = prm.q;
  prm.mu1 = prm.p;
  prm.mu2 = prm.q;
  const Model m = build_two_state_pmm(prm);
  const auto marginal = [&](int a, int b) {
    return (a == 1) ? (b == 1 ? prm.p : 1 - prm.p) : (b == 1 ? prm.q : 1 - prm.q);
  };
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y)
      for (int xn = 1; xn <= 2; ++xn)
        for (int yn = 1; yn <= 2; ++yn)
          CHECK(m.kernel_exact(x, y, xn, yn) == marginal(x, xn) * marginal(y, yn));
}

TEST_CASE("two-state constraint intervals are enforced by name") {
  TwoStatePmmParams prm = two_state_recipe_params();
  prm.lambda2 = Rational(3, 2);
  CHECK_THROWS_WITH_AS(build_two_state_pmm(prm), doctest::Contains("lambda2"), ModelError);
  prm = two_state_recipe_params();
  prm.mu1 = Rational(-1, 10);
  CHECK_THROWS_WITH_AS(build_two_state_pmm(prm), doctest::Contains("mu1"), ModelError);
}

TEST_CASE("kernel log-density matches the closed forms") {
  const Model m = no_stabilize_model();
  CHECK(m.kernel_log(1, 1, 1, 1) == std::log(0.6875));

  const Model id = no_nodes_model();
  CHECK(id.kernel_log(1, 1, 1, 2) == kLogZero);  // zero transition probability

  const Model glm = glm_scalar_recipe();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const double expected = std::log(0.6) - 0.5 * std::log(2.0 * M_PI);
  CHECK(glm.kernel_log(zero, 1, zero, 1) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(glm.kernel_log(Eigen::VectorXd::Zero(2), 1, zero, 1), ModelError);
}

TEST_CASE("out-of-range discrete symbols have zero density") {
  const Model m = two_state_pmm_recipe();
  CHECK(m.kernel_log(1, 1, 3, 1) == kLogZero);
  CHECK(m.kernel_exact(3, 1, 1, 1) == Rational(0));
  CHECK_THROWS_AS(m.kernel_log(1, 0, 1, 1), ModelError);  // states are checked
}

TEST_CASE("discrete kernels are densities: rows sum to one") {
  const std::vector<Model> models = {two_state_pmm_recipe(), no_stabilize_model(),
                                     tiebreak_pathology_model(), state_revealing_hmm(),
                                     pmmtest::random_generic(3, 3, 42)};
  for (const auto& m : models) {
    const int nx = m.obs_space().symbol_count;
    for (int xp = 1; xp <= nx; ++xp)
      for (int yp = 1; yp <= m.num_states(); ++yp) {
        double sum = 0;
        for (int x = 1; x <= nx; ++x)
          for (int y = 1; y <= m.num_states(); ++y) sum += std::exp(m.kernel_log(xp, yp, x, y));
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
      }
  }
}

TEST_CASE("Gaussian kernel integrates to one on a wide grid") {
  const Model glm = glm_scalar_recipe();
  Eigen::VectorXd xp(1);
  xp[0] = 0.7;
  for (int yp = 1; yp <= 2; ++yp) {
    double integral = 0;
    const double lo = -14.0, hi = 16.0, h = 0.005;
    Eigen::VectorXd x(1);
    for (double v = lo; v <= hi; v += h) {
      x[0] = v;
      double density = 0;
      for (int y = 1; y <= 2; ++y) density += std::exp(glm.kernel_log(xp, yp, x, y));
      integral += density * h;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("pairing doubles the alphabet and bridges the hidden chain") {
  // 2x2 hidden chain with eps=0.3, eps'=0.4
  Hmm h;
  h.num_states = 2;
  h.num_symbols = 2;
  h.transitions = {Rational(3, 10), Rational(7, 10), Rational(3, 5), Rational(2, 5)};
  h.emissions = {Rational(1, 2), Rational(1, 2), Rational(1, 3), Rational(2, 3)};
  h.initial_hidden = {Rational(1, 2), Rational(1, 2)};
  const Model base{std::move(h)};
  const PairedModel paired = pair_model(base);

  REQUIRE(paired.hidden_labels.size() == 4);
  const auto& pg = paired.model.as_generic();
  CHECK(pg.num_symbols == 4);

  // hidden pair-chain transitions: sum the paired kernel over next symbols
  const auto pair_chain = [&](int a, int b) {
    Rational sum(0);
    const int nps = pg.num_states;
    const int npz = pg.num_symbols * nps;
    for (int x = 1; x <= pg.num_symbols; ++x)
      sum += pg.kernel[static_cast<std::size_t>(0 * nps + a) * npz + ((x - 1) * nps + b)];
    return sum;
  };
  const auto label_of = [&](int i, int j) {
    for (std::size_t k = 0; k < paired.hidden_labels.size(); ++k)
      if (paired.hidden_labels[k] == std::make_pair(i, j)) return static_cast<int>(k);
    REQUIRE(false);
    return -1;
  };
  // (1,1)->(1,1) = eps^2 = 9/100; (1,2)->(1,2) = (1-eps')(1-eps) = 42/100
  CHECK(pair_chain(label_of(1, 1), label_of(1, 1)) == Rational(9, 100));
  CHECK(pair_chain(label_of(1, 2), label_of(1, 2)) == Rational(42, 100));
}

TEST_CASE("pairing the frozen-regime chain keeps only the diagonal pairs") {
  const PairedModel paired = pair_model(no_nodes_model());
  REQUIRE(paired.hidden_labels.size() == 2);
  CHECK(paired.hidden_labels[0] == std::make_pair(1, 1));
  CHECK(paired.hidden_labels[1] == std::make_pair(2, 2));
  const auto& pg = paired.model.as_generic();
  const int nps = 2, npz = 4 * 2;
  // pair-chain transition matrix is the 2x2 identity
  for (int a = 0; a < nps; ++a)
    for (int b = 0; b < nps; ++b) {
      Rational sum(0);
      for (int x = 1; x <= 4; ++x)
        sum += pg.kernel[static_cast<std::size_t>(0 * nps + a) * npz + ((x - 1) * nps + b)];
      CHECK(sum == (a == b ? Rational(1) : Rational(0)));
    }
}

TEST_CASE("pairing preserves trajectory likelihood exactly") {
  const Model base = pmmtest::random_generic(2, 2, 9, /*zero_tenths=*/0);
  const PairedModel paired = pair_model(base);
  const auto traj = simulate(base, 8, 77);
  const auto& xs = traj.observations.symbols();

  // likelihood under the base chain
  Rational lik = base.initial_exact(xs[0], traj.hidden[0]);
  for (int t = 2; t <= 8; ++t) {
    lik *= base.kernel_exact(xs[static_cast<std::size_t>(t - 2)],
                             traj.hidden[static_cast<std::size_t>(t - 2)],
                             xs[static_cast<std::size_t>(t - 1)],
                             traj.hidden[static_cast<std::size_t>(t - 1)]);
  }

  // the same trajectory grouped in pairs
  const auto label_of = [&](int i, int j) {
    for (std::size_t k = 0; k < paired.hidden_labels.size(); ++k)
      if (paired.hidden_labels[k] == std::make_pair(i, j)) return static_cast<int>(k) + 1;
    REQUIRE(false);
    return -1;
  };
  const int nx = base.obs_space().symbol_count;
  const auto pair_sym = [&](int x1, int x2) { return (x1 - 1) * nx + x2; };
  Rational plik = paired.model.initial_exact(pair_sym(xs[0], xs[1]),
                                             label_of(traj.hidden[0], traj.hidden[1]));
  for (int k = 2; k <= 4; ++k) {
    plik *= paired.model.kernel_exact(
        pair_sym(xs[2 * k - 4], xs[2 * k - 3]),
        label_of(traj.hidden[2 * k - 4], traj.hidden[2 * k - 3]),
        pair_sym(xs[2 * k - 2], xs[2 * k - 1]),
        label_of(traj.hidden[2 * k - 2], traj.hidden[2 * k - 1]));
  }
  CHECK(lik == plik);
}

TEST_CASE("pairing a Gaussian switching model uses the block formulas") {
  const PairedModel paired = pair_model(glm_scalar_recipe());
  REQUIRE(paired.hidden_labels.size() == 4);
  const auto& pg = paired.model.as_glm();
  CHECK(pg.dim == 2);

  const auto idx_of = [&](int i, int j) {
    for (std::size_t k = 0; k < paired.hidden_labels.size(); ++k)
      if (paired.hidden_labels[k] == std::make_pair(i, j)) return static_cast<int>(k);
    REQUIRE(false);
    return -1;
  };
  // pair (1,2): noise mean (mu_1, F(2) mu_1 + mu_2) = (0, 2),
  // covariance B diag(S1, S2) B^T with B = [[1,0],[0.4,1]]
  const int k12 = idx_of(1, 2);
  CHECK(pg.noise_mean[k12][0] == doctest::Approx(0.0));
  CHECK(pg.noise_mean[k12][1] == doctest::Approx(2.0));
  CHECK(pg.noise_cov[k12](0, 0) == doctest::Approx(1.0));
  CHECK(pg.noise_cov[k12](0, 1) == doctest::Approx(0.4));
  CHECK(pg.noise_cov[k12](1, 1) == doctest::Approx(1.16));
  // pair coefficient for target (k,l)=(1,2): [[0, F(1)],[0, F(2)F(1)]]
  CHECK(pg.coeff[k12](0, 1) == doctest::Approx(0.3));
  CHECK(pg.coeff[k12](1, 1) == doctest::Approx(0.12));
  CHECK(pg.coeff[k12](0, 0) == 0.0);

  // pair-chain transitions P'[(i,j),(k,l)] = p_jk p_kl
  const Model base_model = glm_scalar_recipe();
  const auto& base = base_model.as_glm();
  const auto p = [&](int i, int j) {
    return base.transitions[static_cast<std::size_t>(i - 1) * 2 + (j - 1)];
  };
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int k = 1; k <= 2; ++k)
        for (int l = 1; l <= 2; ++l) {
          CHECK(pg.transitions[static_cast<std::size_t>(idx_of(i, j)) * 4 + idx_of(k, l)] ==
                p(j, k) * p(k, l));
        }
}

TEST_CASE("pairing rejects unsupported variants") {
  DiscreteSwitching s;
  s.num_states = 1;
  s.num_symbols = 1;
  s.transitions = {Rational(1)};
  s.emissions = {Rational(1)};
  s.initial = {Rational(1)};
  CHECK_THROWS_AS(pair_model(Model(std::move(s))), ModelError);
}
