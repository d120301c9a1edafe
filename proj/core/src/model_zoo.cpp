#include "pmm/model_zoo.hpp"

namespace pmm {

namespace {

void check_tracking_chain(const Rational& p, int K, const Rational& eps) {
  // eps < 1-p-eps/2 < 1/2 < p-eps/2 < 1
  const Rational a = p - eps / 2;
  const Rational b = 1 - p - eps / 2;
  const Rational half(1, 2);
  if (!(eps < b && b < half && half < a && a < 1)) {
    throw ModelError("(p=" + to_string(p) + ", K=" + std::to_string(K) +
                     ") violates the parameter chain eps < 1-p-eps/2 < 1/2 < p-eps/2 < 1");
  }
}

}  // namespace

Model no_stabilize_model(const Rational& p, int K) {
  if (K < 1) throw ModelError("K must be positive");
  const Rational eps(1, 2 * K);
  check_tracking_chain(p, K, eps);
  const Rational a = p - eps / 2;      // tracked symbol
  const Rational b = 1 - p - eps / 2;  // other symbol
  const Rational eps2 = eps * eps;

  const int ns = K + 2;
  const int nz = 2 * ns;
  GenericDiscrete g;
  g.num_symbols = 2;
  g.num_states = ns;
  g.kernel.assign(static_cast<std::size_t>(nz) * nz, Rational(0));
  g.initial.assign(nz, Rational(0));

  const auto z = [ns](int x, int y) { return (x - 1) * ns + (y - 1); };
  for (int xp = 1; xp <= 2; ++xp) {
    for (int yp = 1; yp <= ns; ++yp) {
      auto* row = &g.kernel[static_cast<std::size_t>(z(xp, yp)) * nz];
      if (yp == 1) {
        row[z(1, 1)] = a;
        row[z(2, 1)] = b;
        for (int k = 3; k <= ns; ++k) row[z(1, k)] = row[z(2, k)] = eps2;
      } else if (yp == 2) {
        row[z(1, 2)] = b;
        row[z(2, 2)] = a;
        for (int k = 3; k <= ns; ++k) row[z(1, k)] = row[z(2, k)] = eps2;
      } else {
        for (int k = 3; k <= ns; ++k) row[z(1, k)] = row[z(2, k)] = eps;
      }
    }
  }
  for (int x = 1; x <= 2; ++x)
    for (int y = 1; y <= 2; ++y) g.initial[z(x, y)] = Rational(1, 4);
  return Model(std::move(g));
}

Model no_stabilize_hmm(const Rational& p, int K) {
  if (K < 1) throw ModelError("K must be positive");
  const Rational eps(1, 2 * K);
  check_tracking_chain(p, K, eps);
  const Rational a = (p - eps / 2) / (1 - eps);
  const Rational b = (1 - p - eps / 2) / (1 - eps);

  const int ns = K + 2;
  Hmm h;
  h.num_states = ns;
  h.num_symbols = 2;
  h.transitions.assign(static_cast<std::size_t>(ns) * ns, Rational(0));
  h.emissions.assign(static_cast<std::size_t>(ns) * 2, Rational(0));
  h.initial_hidden.assign(ns, Rational(0));

  h.transitions[0 * ns + 0] = 1 - eps;
  h.transitions[1 * ns + 1] = 1 - eps;
  for (int k = 3; k <= ns; ++k) {
    h.transitions[0 * ns + (k - 1)] = eps / K;
    h.transitions[1 * ns + (k - 1)] = eps / K;
    for (int l = 3; l <= ns; ++l) h.transitions[(k - 1) * static_cast<std::size_t>(ns) + (l - 1)] = Rational(1, K);
  }
  h.emissions[0 * 2 + 0] = a;
  h.emissions[0 * 2 + 1] = b;
  h.emissions[1 * 2 + 0] = b;
  h.emissions[1 * 2 + 1] = a;
  for (int k = 3; k <= ns; ++k) {
    h.emissions[(k - 1) * 2 + 0] = Rational(1, 2);
    h.emissions[(k - 1) * 2 + 1] = Rational(1, 2);
  }
  h.initial_hidden[0] = Rational(1, 2);
  h.initial_hidden[1] = Rational(1, 2);
  return Model(std::move(h));
}

Model no_nodes_model(const Rational& p) {
  if (!(p > Rational(1, 2) && p < 1)) throw ModelError("p must lie in (1/2, 1)");
  Hmm h;
  h.num_states = 2;
  h.num_symbols = 2;
  h.transitions = {Rational(1), Rational(0), Rational(0), Rational(1)};
  h.emissions = {p, 1 - p, 1 - p, p};
  h.initial_hidden = {Rational(1, 2), Rational(1, 2)};
  return Model(std::move(h));
}

Model tiebreak_pathology_model(const Rational& p) {
  if (!(p > 0 && p < 1)) throw ModelError("p must lie in (0,1)");
  const Rational e(1, 3);
  const Rational z(0);
  Hmm h;
  h.num_states = 4;
  h.num_symbols = 3;
  h.transitions = {
      e, e, e, z,
      e, e, z, e,
      z, e, e, e,
      e, z, e, e,
  };
  const Rational r = 1 - p;  // residual symbol mass
  h.emissions = {
      p, z, r,
      p, z, r,
      z, p, r,
      z, p, r,
  };
  h.initial_hidden.assign(4, Rational(1, 4));
  return Model(std::move(h));
}

TwoStatePmmParams two_state_recipe_params() {
  TwoStatePmmParams prm;
  prm.p = Rational(1, 2);
  prm.q = Rational(1, 2);
  prm.lambda1 = Rational(4, 5);
  prm.lambda2 = Rational(3, 10);
  prm.mu1 = Rational(3, 5);
  prm.mu2 = Rational(2, 5);
  return prm;
}

Model two_state_pmm_recipe() { return build_two_state_pmm(two_state_recipe_params()); }

Model glm_scalar_recipe() {
  GaussianLinearSwitching g;
  g.num_states = 2;
  g.dim = 1;
  g.transitions = {Rational(3, 5), Rational(2, 5), Rational(1, 2), Rational(1, 2)};
  g.coeff = {Eigen::MatrixXd::Constant(1, 1, 0.3), Eigen::MatrixXd::Constant(1, 1, 0.4)};
  g.noise_mean = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 2.0)};
  g.noise_cov = {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)};
  g.initial_hidden = {Rational(1, 2), Rational(1, 2)};
  return Model(std::move(g));
}

Model state_revealing_hmm() {
  Hmm h;
  h.num_states = 2;
  h.num_symbols = 3;
  h.transitions = {Rational(7, 10), Rational(3, 10), Rational(2, 5), Rational(3, 5)};
  h.emissions = {
      Rational(1, 2), Rational(0), Rational(1, 2),
      Rational(0), Rational(1, 2), Rational(1, 2),
  };
  h.initial_hidden = {Rational(1, 2), Rational(1, 2)};
  return Model(std::move(h));
}

}  // namespace pmm
