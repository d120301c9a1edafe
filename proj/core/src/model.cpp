#include "pmm/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pmm {

namespace {

using json = nlohmann::json;

const Rational& row_sum_tolerance() {
  static const Rational tol(BigInt(1), boost::multiprecision::pow(BigInt(10), 12));
  return tol;
}

void check_row_sum(const Rational& sum, const std::string& what) {
  Rational dev = sum - 1;
  if (dev < 0) dev = -dev;
  if (dev > row_sum_tolerance()) {
    throw ModelError(what + " sums to " + std::to_string(to_double(sum)) +
                     " (deviation " + std::to_string(to_double(dev)) + ")");
  }
}

void check_probability(const Rational& p, const std::string& what) {
  if (p < 0 || p > 1) {
    throw ModelError(what + " = " + to_string(p) + " is not in [0,1]");
  }
}

double log_of(const Rational& p) { return p.is_zero() ? kLogZero : std::log(to_double(p)); }

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

void check_spd(const Eigen::MatrixXd& cov, const std::string& what, Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (cov.rows() != cov.cols()) throw ModelError(what + " is not square");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ModelError(what + " is not symmetric");
  }
  llt.compute(cov);
  if (llt.info() != Eigen::Success) {
    throw ModelError(what + " is not positive definite (Cholesky failed)");
  }
}

double gaussian_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                            const Eigen::MatrixXd& prec, double log_norm) {
  const Eigen::VectorXd c = x - mean;
  return log_norm - 0.5 * c.dot(prec * c);
}

}  // namespace

// ---------------------------------------------------------------------------

Model::Model(GenericDiscrete m) : family_(Family::GenericDiscrete), generic_(std::move(m)) {
  validate_and_cache();
}
Model::Model(Hmm m) : family_(Family::Hmm), hmm_(std::move(m)) { validate_and_cache(); }
Model::Model(DiscreteSwitching m) : family_(Family::DiscreteSwitching), switching_(std::move(m)) {
  validate_and_cache();
}
Model::Model(GaussianLinearSwitching m)
    : family_(Family::GaussianLinearSwitching), glm_(std::move(m)) {
  validate_and_cache();
}

const GenericDiscrete& Model::as_generic() const {
  if (!generic_) throw ModelError("model is not generic_discrete");
  return *generic_;
}
const Hmm& Model::as_hmm() const {
  if (!hmm_) throw ModelError("model is not hmm");
  return *hmm_;
}
const DiscreteSwitching& Model::as_switching() const {
  if (!switching_) throw ModelError("model is not discrete_switching");
  return *switching_;
}
const GaussianLinearSwitching& Model::as_glm() const {
  if (!glm_) throw ModelError("model is not gaussian_linear_switching");
  return *glm_;
}

void Model::validate_and_cache() {
  switch (family_) {
    case Family::GenericDiscrete: {
      const auto& m = *generic_;
      if (m.num_symbols < 1 || m.num_states < 1) throw ModelError("spaces must be nonempty");
      const std::size_t nz = static_cast<std::size_t>(m.num_symbols) * m.num_states;
      if (m.kernel.size() != nz * nz) throw ModelError("kernel size mismatch");
      if (m.initial.size() != nz) throw ModelError("initial size mismatch");
      for (std::size_t zp = 0; zp < nz; ++zp) {
        Rational sum(0);
        for (std::size_t z = 0; z < nz; ++z) {
          check_probability(m.kernel[zp * nz + z], "kernel entry");
          sum += m.kernel[zp * nz + z];
        }
        check_row_sum(sum, "kernel row " + std::to_string(zp + 1));
      }
      Rational isum(0);
      for (const auto& p : m.initial) {
        check_probability(p, "initial entry");
        isum += p;
      }
      check_row_sum(isum, "initial distribution");
      states_ = {m.num_states};
      obs_ = {ObservationSpace::Kind::Discrete, m.num_symbols, 0};
      log_kernel_.resize(nz * nz);
      for (std::size_t i = 0; i < nz * nz; ++i) log_kernel_[i] = log_of(m.kernel[i]);
      log_initial_.resize(nz);
      for (std::size_t i = 0; i < nz; ++i) log_initial_[i] = log_of(m.initial[i]);
      break;
    }
    case Family::Hmm: {
      const auto& m = *hmm_;
      if (m.num_states < 1 || m.num_symbols < 1) throw ModelError("spaces must be nonempty");
      const std::size_t ns = m.num_states, nx = m.num_symbols;
      if (m.transitions.size() != ns * ns) throw ModelError("transition size mismatch");
      if (m.emissions.size() != ns * nx) throw ModelError("emission size mismatch");
      if (m.initial_hidden.size() != ns) throw ModelError("initial_hidden size mismatch");
      for (std::size_t i = 0; i < ns; ++i) {
        Rational sum(0);
        for (std::size_t j = 0; j < ns; ++j) {
          check_probability(m.transitions[i * ns + j], "transition entry");
          sum += m.transitions[i * ns + j];
        }
        check_row_sum(sum, "transition row " + std::to_string(i + 1));
        Rational esum(0);
        for (std::size_t x = 0; x < nx; ++x) {
          check_probability(m.emissions[i * nx + x], "emission entry");
          esum += m.emissions[i * nx + x];
        }
        check_row_sum(esum, "emission row " + std::to_string(i + 1));
      }
      Rational isum(0);
      for (const auto& p : m.initial_hidden) {
        check_probability(p, "initial entry");
        isum += p;
      }
      check_row_sum(isum, "initial distribution");
      states_ = {static_cast<int>(ns)};
      obs_ = {ObservationSpace::Kind::Discrete, static_cast<int>(nx), 0};
      log_transitions_.resize(ns * ns);
      for (std::size_t i = 0; i < ns * ns; ++i) log_transitions_[i] = log_of(m.transitions[i]);
      log_emissions_.resize(ns * nx);
      for (std::size_t i = 0; i < ns * nx; ++i) log_emissions_[i] = log_of(m.emissions[i]);
      log_initial_.resize(ns);
      for (std::size_t i = 0; i < ns; ++i) log_initial_[i] = log_of(m.initial_hidden[i]);
      break;
    }
    case Family::DiscreteSwitching: {
      const auto& m = *switching_;
      if (m.num_states < 1 || m.num_symbols < 1) throw ModelError("spaces must be nonempty");
      const std::size_t ns = m.num_states, nx = m.num_symbols;
      if (m.transitions.size() != ns * ns) throw ModelError("transition size mismatch");
      if (m.emissions.size() != ns * nx * nx) throw ModelError("emission size mismatch");
      if (m.initial.size() != nx * ns) throw ModelError("initial size mismatch");
      for (std::size_t i = 0; i < ns; ++i) {
        Rational sum(0);
        for (std::size_t j = 0; j < ns; ++j) {
          check_probability(m.transitions[i * ns + j], "transition entry");
          sum += m.transitions[i * ns + j];
        }
        check_row_sum(sum, "transition row " + std::to_string(i + 1));
        for (std::size_t xp = 0; xp < nx; ++xp) {
          Rational esum(0);
          for (std::size_t x = 0; x < nx; ++x) {
            const auto& e = m.emissions[(i * nx + xp) * nx + x];
            check_probability(e, "emission entry");
            esum += e;
          }
          check_row_sum(esum, "emission row (state " + std::to_string(i + 1) + ", given symbol " +
                                  std::to_string(xp + 1) + ")");
        }
      }
      Rational isum(0);
      for (const auto& p : m.initial) {
        check_probability(p, "initial entry");
        isum += p;
      }
      check_row_sum(isum, "initial distribution");
      states_ = {static_cast<int>(ns)};
      obs_ = {ObservationSpace::Kind::Discrete, static_cast<int>(nx), 0};
      log_transitions_.resize(ns * ns);
      for (std::size_t i = 0; i < ns * ns; ++i) log_transitions_[i] = log_of(m.transitions[i]);
      log_emissions_.resize(ns * nx * nx);
      for (std::size_t i = 0; i < ns * nx * nx; ++i) log_emissions_[i] = log_of(m.emissions[i]);
      log_initial_.resize(nx * ns);
      for (std::size_t i = 0; i < nx * ns; ++i) log_initial_[i] = log_of(m.initial[i]);
      break;
    }
    case Family::GaussianLinearSwitching: {
      auto& m = *glm_;
      if (m.num_states < 1 || m.dim < 1) throw ModelError("spaces must be nonempty");
      const std::size_t ns = m.num_states;
      const int d = m.dim;
      if (m.transitions.size() != ns * ns) throw ModelError("transition size mismatch");
      if (m.coeff.size() != ns || m.noise_mean.size() != ns || m.noise_cov.size() != ns) {
        throw ModelError("per-state parameter count mismatch");
      }
      if (m.initial_hidden.size() != ns) throw ModelError("initial_hidden size mismatch");
      if (m.init_mean.empty()) m.init_mean.assign(ns, Eigen::VectorXd::Zero(d));
      if (m.init_cov.empty()) m.init_cov.assign(ns, Eigen::MatrixXd::Identity(d, d));
      if (m.init_mean.size() != ns || m.init_cov.size() != ns) {
        throw ModelError("initial density count mismatch");
      }
      for (std::size_t i = 0; i < ns; ++i) {
        Rational sum(0);
        for (std::size_t j = 0; j < ns; ++j) {
          check_probability(m.transitions[i * ns + j], "transition entry");
          sum += m.transitions[i * ns + j];
        }
        check_row_sum(sum, "transition row " + std::to_string(i + 1));
        if (m.coeff[i].rows() != d || m.coeff[i].cols() != d) {
          throw ModelError("coefficient matrix " + std::to_string(i + 1) + " is not " +
                           std::to_string(d) + "x" + std::to_string(d));
        }
        if (m.noise_mean[i].size() != d || m.init_mean[i].size() != d) {
          throw ModelError("mean vector " + std::to_string(i + 1) + " has wrong dimension");
        }
      }
      Rational isum(0);
      for (const auto& p : m.initial_hidden) {
        check_probability(p, "initial entry");
        isum += p;
      }
      check_row_sum(isum, "initial distribution");

      states_ = {static_cast<int>(ns)};
      obs_ = {ObservationSpace::Kind::Euclidean, 0, d};
      log_transitions_.resize(ns * ns);
      for (std::size_t i = 0; i < ns * ns; ++i) log_transitions_[i] = log_of(m.transitions[i]);
      log_initial_.resize(ns);
      for (std::size_t i = 0; i < ns; ++i) log_initial_[i] = log_of(m.initial_hidden[i]);
      noise_prec_.resize(ns);
      noise_norm_.resize(ns);
      noise_chol_.resize(ns);
      init_prec_.resize(ns);
      init_norm_.resize(ns);
      init_chol_.resize(ns);
      for (std::size_t i = 0; i < ns; ++i) {
        check_spd(m.noise_cov[i], "noise covariance " + std::to_string(i + 1), noise_chol_[i]);
        noise_prec_[i] = noise_chol_[i].solve(Eigen::MatrixXd::Identity(d, d));
        double log_det = 0;
        for (int k = 0; k < d; ++k) log_det += 2.0 * std::log(noise_chol_[i].matrixL()(k, k));
        noise_norm_[i] = -0.5 * (d * kLogTwoPi + log_det);
        check_spd(m.init_cov[i], "initial covariance " + std::to_string(i + 1), init_chol_[i]);
        init_prec_[i] = init_chol_[i].solve(Eigen::MatrixXd::Identity(d, d));
        log_det = 0;
        for (int k = 0; k < d; ++k) log_det += 2.0 * std::log(init_chol_[i].matrixL()(k, k));
        init_norm_[i] = -0.5 * (d * kLogTwoPi + log_det);
      }
      break;
    }
  }
}

// ---------------------------------------------------------------------------

double Model::kernel_log(int x_prev, int y_prev, int x, int y) const {
  const int ns = num_states();
  if (y_prev < 1 || y_prev > ns || y < 1 || y > ns) throw ModelError("state out of range");
  if (!discrete()) throw ModelError("discrete observation passed to a Euclidean model");
  const int nx = obs_.symbol_count;
  if (x_prev < 1 || x < 1) throw ModelError("symbols are 1-based");
  if (x_prev > nx || x > nx) return kLogZero;  // outside support: zero density
  switch (family_) {
    case Family::GenericDiscrete: {
      const int nz = nx * ns;
      const int zp = (x_prev - 1) * ns + (y_prev - 1);
      const int z = (x - 1) * ns + (y - 1);
      return log_kernel_[static_cast<std::size_t>(zp) * nz + z];
    }
    case Family::Hmm:
      return log_transitions_[(y_prev - 1) * ns + (y - 1)] + log_emissions_[(y - 1) * nx + (x - 1)];
    case Family::DiscreteSwitching:
      return log_transitions_[(y_prev - 1) * ns + (y - 1)] +
             log_emissions_[((y - 1) * static_cast<std::size_t>(nx) + (x_prev - 1)) * nx + (x - 1)];
    default:
      throw ModelError("discrete kernel queried on a Euclidean model");
  }
}

double Model::kernel_log(const Eigen::VectorXd& x_prev, int y_prev, const Eigen::VectorXd& x,
                         int y) const {
  if (family_ != Family::GaussianLinearSwitching) {
    throw ModelError("Euclidean observation passed to a discrete model");
  }
  const auto& m = *glm_;
  const int ns = num_states();
  if (y_prev < 1 || y_prev > ns || y < 1 || y > ns) throw ModelError("state out of range");
  if (x_prev.size() != m.dim || x.size() != m.dim) throw ModelError("observation dimension mismatch");
  const double lp = log_transitions_[(y_prev - 1) * ns + (y - 1)];
  if (lp == kLogZero) return kLogZero;
  const Eigen::VectorXd resid = x - m.coeff[y - 1] * x_prev;
  return lp + gaussian_log_density(resid, m.noise_mean[y - 1], noise_prec_[y - 1], noise_norm_[y - 1]);
}

double Model::initial_log(int x, int y) const {
  const int ns = num_states();
  if (y < 1 || y > ns) throw ModelError("state out of range");
  if (!discrete()) throw ModelError("discrete observation passed to a Euclidean model");
  const int nx = obs_.symbol_count;
  if (x < 1) throw ModelError("symbols are 1-based");
  if (x > nx) return kLogZero;
  switch (family_) {
    case Family::GenericDiscrete:
    case Family::DiscreteSwitching:
      return log_initial_[(x - 1) * ns + (y - 1)];
    case Family::Hmm:
      return log_initial_[y - 1] + log_emissions_[(y - 1) * nx + (x - 1)];
    default:
      throw ModelError("discrete kernel queried on a Euclidean model");
  }
}

double Model::initial_log(const Eigen::VectorXd& x, int y) const {
  if (family_ != Family::GaussianLinearSwitching) {
    throw ModelError("Euclidean observation passed to a discrete model");
  }
  const auto& m = *glm_;
  if (y < 1 || y > num_states()) throw ModelError("state out of range");
  if (x.size() != m.dim) throw ModelError("observation dimension mismatch");
  const double lp = log_initial_[y - 1];
  if (lp == kLogZero) return kLogZero;
  return lp + gaussian_log_density(x, m.init_mean[y - 1], init_prec_[y - 1], init_norm_[y - 1]);
}

Rational Model::kernel_exact(int x_prev, int y_prev, int x, int y) const {
  if (!exact_capable()) throw ModelError("exact arithmetic requires a discrete model");
  const int ns = num_states();
  const int nx = obs_.symbol_count;
  if (y_prev < 1 || y_prev > ns || y < 1 || y > ns) throw ModelError("state out of range");
  if (x_prev < 1 || x < 1) throw ModelError("symbols are 1-based");
  if (x_prev > nx || x > nx) return Rational(0);
  switch (family_) {
    case Family::GenericDiscrete: {
      const int nz = nx * ns;
      return generic_->kernel[static_cast<std::size_t>((x_prev - 1) * ns + (y_prev - 1)) * nz +
                              ((x - 1) * ns + (y - 1))];
    }
    case Family::Hmm:
      return hmm_->transitions[(y_prev - 1) * ns + (y - 1)] * hmm_->emissions[(y - 1) * nx + (x - 1)];
    case Family::DiscreteSwitching:
      return switching_->transitions[(y_prev - 1) * ns + (y - 1)] *
             switching_->emissions[((y - 1) * static_cast<std::size_t>(nx) + (x_prev - 1)) * nx + (x - 1)];
    default:
      throw ModelError("unreachable");
  }
}

Rational Model::initial_exact(int x, int y) const {
  if (!exact_capable()) throw ModelError("exact arithmetic requires a discrete model");
  const int ns = num_states();
  const int nx = obs_.symbol_count;
  if (y < 1 || y > ns) throw ModelError("state out of range");
  if (x < 1) throw ModelError("symbols are 1-based");
  if (x > nx) return Rational(0);
  switch (family_) {
    case Family::GenericDiscrete:
      return generic_->initial[(x - 1) * ns + (y - 1)];
    case Family::DiscreteSwitching:
      return switching_->initial[(x - 1) * ns + (y - 1)];
    case Family::Hmm:
      return hmm_->initial_hidden[y - 1] * hmm_->emissions[(y - 1) * nx + (x - 1)];
    default:
      throw ModelError("unreachable");
  }
}

void Model::step_matrix_log(const ObsSeq& obs, int t, double* out) const {
  const int ns = num_states();
  if (t < 2 || t > obs.size()) throw ModelError("step index out of range");
  if (obs.is_discrete()) {
    const int xp = obs.symbol(t - 1), x = obs.symbol(t);
    for (int i = 1; i <= ns; ++i)
      for (int j = 1; j <= ns; ++j) out[(i - 1) * ns + (j - 1)] = kernel_log(xp, i, x, j);
  } else {
    const auto& xp = obs.point(t - 1);
    const auto& x = obs.point(t);
    for (int i = 1; i <= ns; ++i)
      for (int j = 1; j <= ns; ++j) out[(i - 1) * ns + (j - 1)] = kernel_log(xp, i, x, j);
  }
}

void Model::step_matrix_exact(const ObsSeq& obs, int t, Rational* out) const {
  const int ns = num_states();
  if (t < 2 || t > obs.size()) throw ModelError("step index out of range");
  if (!obs.is_discrete()) throw ModelError("exact arithmetic requires a discrete model");
  const int xp = obs.symbol(t - 1), x = obs.symbol(t);
  for (int i = 1; i <= ns; ++i)
    for (int j = 1; j <= ns; ++j) out[(i - 1) * ns + (j - 1)] = kernel_exact(xp, i, x, j);
}

void Model::initial_vector_log(const ObsSeq& obs, double* out) const {
  const int ns = num_states();
  if (obs.empty()) throw ModelError("empty observation sequence");
  if (obs.is_discrete()) {
    for (int y = 1; y <= ns; ++y) out[y - 1] = initial_log(obs.symbol(1), y);
  } else {
    for (int y = 1; y <= ns; ++y) out[y - 1] = initial_log(obs.point(1), y);
  }
}

void Model::initial_vector_exact(const ObsSeq& obs, Rational* out) const {
  const int ns = num_states();
  if (obs.empty()) throw ModelError("empty observation sequence");
  if (!obs.is_discrete()) throw ModelError("exact arithmetic requires a discrete model");
  for (int y = 1; y <= ns; ++y) out[y - 1] = initial_exact(obs.symbol(1), y);
}

const std::vector<Rational>& Model::hidden_transitions() const {
  switch (family_) {
    case Family::Hmm:
      return hmm_->transitions;
    case Family::DiscreteSwitching:
      return switching_->transitions;
    case Family::GaussianLinearSwitching:
      return glm_->transitions;
    default:
      throw ModelError("joint kernel models have no factored hidden transition matrix");
  }
}

GenericDiscrete Model::to_generic() const {
  if (!discrete()) throw ModelError("only discrete models have a joint kernel view");
  if (family_ == Family::GenericDiscrete) return *generic_;
  const int ns = num_states();
  const int nx = obs_.symbol_count;
  const int nz = nx * ns;
  GenericDiscrete g;
  g.num_symbols = nx;
  g.num_states = ns;
  g.kernel.resize(static_cast<std::size_t>(nz) * nz);
  g.initial.resize(nz);
  for (int xp = 1; xp <= nx; ++xp)
    for (int i = 1; i <= ns; ++i)
      for (int x = 1; x <= nx; ++x)
        for (int j = 1; j <= ns; ++j)
          g.kernel[static_cast<std::size_t>((xp - 1) * ns + (i - 1)) * nz + ((x - 1) * ns + (j - 1))] =
              kernel_exact(xp, i, x, j);
  for (int x = 1; x <= nx; ++x)
    for (int y = 1; y <= ns; ++y) g.initial[(x - 1) * ns + (y - 1)] = initial_exact(x, y);
  return g;
}

// ---------------------------------------------------------------------------

Model build_two_state_pmm(const TwoStatePmmParams& prm) {
  const Rational &p = prm.p, &q = prm.q;
  if (p <= 0 || p >= 1 || q <= 0 || q >= 1) throw ModelError("p and q must lie in (0,1)");

  const auto rmax = [](const Rational& a, const Rational& b) { return a > b ? a : b; };
  const auto rmin = [](const Rational& a, const Rational& b) { return a < b ? a : b; };
  const Rational zero(0), one(1);

  struct Bound {
    const char* name;
    const Rational& value;
    Rational lo, hi;
  };
  const Bound bounds[] = {
      {"lambda1", prm.lambda1, rmax((2 * p - 1) / p, zero), one},
      {"lambda2", prm.lambda2, rmax((q + p - 1) / p, zero), rmin(q / p, one)},
      {"mu1", prm.mu1, rmax((p + q - 1) / q, zero), rmin(p / q, one)},
      {"mu2", prm.mu2, rmax((2 * q - 1) / q, zero), one},
  };
  for (const auto& b : bounds) {
    if (b.value < b.lo || b.value > b.hi) {
      throw ModelError(std::string(b.name) + " = " + to_string(b.value) + " outside [" +
                       to_string(b.lo) + ", " + to_string(b.hi) + "]");
    }
  }

  const Rational &l1 = prm.lambda1, &l2 = prm.lambda2, &m1 = prm.mu1, &m2 = prm.mu2;
  GenericDiscrete g;
  g.num_symbols = 2;
  g.num_states = 2;
  // z order: (1,1), (1,2), (2,1), (2,2) with z = (x,y)
  g.kernel = {
      p * l1, p * (1 - l1), p * (1 - l1), 1 + p * l1 - 2 * p,
      p * l2, p * (1 - l2), q - p * l2,   1 + p * l2 - q - p,
      q * m1, q * (1 - m1), p - q * m1,   1 + q * m1 - p - q,
      q * m2, q * (1 - m2), q * (1 - m2), 1 + q * m2 - 2 * q,
  };
  g.initial.assign(4, Rational(1, 4));
  return Model(std::move(g));
}

// ---------------------------------------------------------------------------

namespace {

PairedModel pair_discrete(const Model& model) {
  const GenericDiscrete base = model.to_generic();
  const int ns = base.num_states, nx = base.num_symbols;
  const int nz = nx * ns;
  const auto kern = [&](int xp, int i, int x, int j) -> const Rational& {
    return base.kernel[static_cast<std::size_t>((xp - 1) * ns + (i - 1)) * nz + ((x - 1) * ns + (j - 1))];
  };

  // admissible consecutive state pairs
  std::vector<std::pair<int, int>> labels;
  for (int i = 1; i <= ns; ++i)
    for (int j = 1; j <= ns; ++j) {
      bool possible = false;
      for (int xp = 1; xp <= nx && !possible; ++xp)
        for (int x = 1; x <= nx && !possible; ++x) possible = !kern(xp, i, x, j).is_zero();
      if (possible) labels.emplace_back(i, j);
    }
  const int nps = static_cast<int>(labels.size());
  const int npx = nx * nx;
  const auto pair_symbol = [nx](int x1, int x2) { return (x1 - 1) * nx + x2; };  // 1-based

  GenericDiscrete paired;
  paired.num_symbols = npx;
  paired.num_states = nps;
  const std::size_t npz = static_cast<std::size_t>(npx) * nps;
  paired.kernel.assign(npz * npz, Rational(0));
  paired.initial.assign(npz, Rational(0));

  for (int a = 0; a < nps; ++a) {
    const auto [i1, i2] = labels[a];
    (void)i1;
    for (int x1 = 1; x1 <= nx; ++x1)
      for (int x2 = 1; x2 <= nx; ++x2) {
        const std::size_t zp = static_cast<std::size_t>(pair_symbol(x1, x2) - 1) * nps + a;
        for (int b = 0; b < nps; ++b) {
          const auto [j1, j2] = labels[b];
          for (int x3 = 1; x3 <= nx; ++x3) {
            const Rational first = kern(x2, i2, x3, j1);
            if (first.is_zero()) continue;
            for (int x4 = 1; x4 <= nx; ++x4) {
              const std::size_t z = static_cast<std::size_t>(pair_symbol(x3, x4) - 1) * nps + b;
              paired.kernel[zp * npz + z] = first * kern(x3, j1, x4, j2);
            }
          }
        }
      }
  }
  for (int a = 0; a < nps; ++a) {
    const auto [i, j] = labels[a];
    for (int x1 = 1; x1 <= nx; ++x1) {
      const Rational& init = base.initial[(x1 - 1) * ns + (i - 1)];
      if (init.is_zero()) continue;
      for (int x2 = 1; x2 <= nx; ++x2) {
        paired.initial[static_cast<std::size_t>(pair_symbol(x1, x2) - 1) * nps + a] =
            init * kern(x1, i, x2, j);
      }
    }
  }
  return PairedModel{Model(std::move(paired)), std::move(labels)};
}

PairedModel pair_glm(const Model& model) {
  const auto& m = model.as_glm();
  const int ns = m.num_states, d = m.dim;

  std::vector<std::pair<int, int>> labels;
  for (int i = 1; i <= ns; ++i)
    for (int j = 1; j <= ns; ++j)
      if (!m.transitions[(i - 1) * ns + (j - 1)].is_zero()) labels.emplace_back(i, j);
  const int nps = static_cast<int>(labels.size());

  GaussianLinearSwitching paired;
  paired.num_states = nps;
  paired.dim = 2 * d;
  paired.transitions.assign(static_cast<std::size_t>(nps) * nps, Rational(0));
  const auto p_of = [&](int i, int j) { return m.transitions[(i - 1) * ns + (j - 1)]; };
  for (int a = 0; a < nps; ++a) {
    const int j = labels[a].second;
    for (int b = 0; b < nps; ++b) {
      const auto [k, l] = labels[b];
      paired.transitions[static_cast<std::size_t>(a) * nps + b] = p_of(j, k) * p_of(k, l);
    }
  }

  const auto block_mean_cov = [&](int i, int j, const Eigen::VectorXd& first_mean,
                                  const Eigen::MatrixXd& first_cov, Eigen::VectorXd& mean,
                                  Eigen::MatrixXd& cov) {
    (void)i;
    const Eigen::MatrixXd& F = m.coeff[j - 1];
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    B.topLeftCorner(d, d).setIdentity();
    B.bottomLeftCorner(d, d) = F;
    B.bottomRightCorner(d, d).setIdentity();
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    diag.topLeftCorner(d, d) = first_cov;
    diag.bottomRightCorner(d, d) = m.noise_cov[j - 1];
    cov = B * diag * B.transpose();
    mean.resize(2 * d);
    mean.head(d) = first_mean;
    mean.tail(d) = F * first_mean + m.noise_mean[j - 1];
  };

  for (int b = 0; b < nps; ++b) {
    const auto [k, l] = labels[b];
    Eigen::MatrixXd Fp = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    Fp.topRightCorner(d, d) = m.coeff[k - 1];
    Fp.bottomRightCorner(d, d) = m.coeff[l - 1] * m.coeff[k - 1];
    paired.coeff.push_back(Fp);
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    block_mean_cov(k, l, m.noise_mean[k - 1], m.noise_cov[k - 1], mean, cov);
    paired.noise_mean.push_back(mean);
    paired.noise_cov.push_back(cov);
  }
  for (int a = 0; a < nps; ++a) {
    const auto [i, j] = labels[a];
    paired.initial_hidden.push_back(m.initial_hidden[i - 1] * p_of(i, j));
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    block_mean_cov(i, j, m.init_mean[i - 1], m.init_cov[i - 1], mean, cov);
    paired.init_mean.push_back(mean);
    paired.init_cov.push_back(cov);
  }
  return PairedModel{Model(std::move(paired)), std::move(labels)};
}

}  // namespace

PairedModel pair_model(const Model& model) {
  switch (model.family()) {
    case Model::Family::GenericDiscrete:
    case Model::Family::Hmm:
      return pair_discrete(model);
    case Model::Family::GaussianLinearSwitching:
      return pair_glm(model);
    default:
      throw ModelError("pairing is not supported for this model family");
  }
}

// ---------------------------------------------------------------------------

namespace {

Rational prob_from_json(const json& v, const std::string& what) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number()) return Rational(v.get<double>());
  } catch (const std::invalid_argument& e) {
    throw ModelError(what + ": " + e.what());
  }
  throw ModelError(what + ": expected a decimal string or number");
}

std::vector<Rational> prob_vector(const json& v, const std::string& what) {
  if (!v.is_array()) throw ModelError(what + ": expected an array");
  std::vector<Rational> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(prob_from_json(e, what));
  return out;
}

std::vector<Rational> prob_matrix(const json& v, const std::string& what) {
  if (!v.is_array()) throw ModelError(what + ": expected an array of rows");
  std::vector<Rational> out;
  std::size_t cols = 0;
  for (const auto& row : v) {
    if (!row.is_array()) throw ModelError(what + ": expected an array of rows");
    if (cols == 0) cols = row.size();
    if (row.size() != cols) throw ModelError(what + ": ragged rows");
    for (const auto& e : row) out.push_back(prob_from_json(e, what));
  }
  return out;
}

Eigen::VectorXd vec_from_json(const json& v, const std::string& what) {
  if (!v.is_array()) throw ModelError(what + ": expected an array");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ModelError(what + ": expected numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Eigen::MatrixXd mat_from_json(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw ModelError(what + ": expected an array of rows");
  const std::size_t rows = v.size();
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  Eigen::MatrixXd out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!v[r].is_array() || v[r].size() != cols) throw ModelError(what + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = v[r][c].get<double>();
  }
  return out;
}

int int_field(const json& doc, const char* name) {
  if (!doc.contains(name) || !doc[name].is_number_integer()) {
    throw ModelError(std::string("missing or non-integer field '") + name + "'");
  }
  return doc[name].get<int>();
}

const json& field(const json& doc, const char* name) {
  if (!doc.contains(name)) throw ModelError(std::string("missing field '") + name + "'");
  return doc[name];
}

Model load_gaussian(const json& doc, int num_states, std::vector<Rational> transitions,
                    std::vector<Rational> initial_hidden, const json& means_j, const json& covs_j,
                    const json* coeff_j, const json* init_j) {
  GaussianLinearSwitching g;
  g.num_states = num_states;
  g.transitions = std::move(transitions);
  g.initial_hidden = std::move(initial_hidden);
  for (const auto& v : means_j) g.noise_mean.push_back(vec_from_json(v, "noise mean"));
  for (const auto& v : covs_j) g.noise_cov.push_back(mat_from_json(v, "noise covariance"));
  if (g.noise_mean.empty()) throw ModelError("at least one noise mean required");
  g.dim = static_cast<int>(g.noise_mean[0].size());
  if (coeff_j) {
    for (const auto& v : *coeff_j) g.coeff.push_back(mat_from_json(v, "coefficient matrix"));
  } else {
    g.coeff.assign(num_states, Eigen::MatrixXd::Zero(g.dim, g.dim));
  }
  if (init_j) {
    const json& init = *init_j;
    if (init.contains("mean")) {
      g.init_mean.assign(num_states, vec_from_json(init["mean"], "initial mean"));
    }
    if (init.contains("cov")) {
      g.init_cov.assign(num_states, mat_from_json(init["cov"], "initial covariance"));
    }
    if (init.contains("means")) {
      g.init_mean.clear();
      for (const auto& v : init["means"]) g.init_mean.push_back(vec_from_json(v, "initial mean"));
    }
    if (init.contains("covs")) {
      g.init_cov.clear();
      for (const auto& v : init["covs"]) g.init_cov.push_back(mat_from_json(v, "initial covariance"));
    }
  }
  return Model(std::move(g));
}

}  // namespace

Model load_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("model document must be a JSON object");
  const std::string type = field(doc, "type").get<std::string>();

  if (type == "generic_discrete") {
    GenericDiscrete g;
    g.num_symbols = int_field(doc, "num_symbols");
    g.num_states = int_field(doc, "num_states");
    g.kernel = prob_matrix(field(doc, "kernel"), "kernel");
    g.initial = prob_vector(field(doc, "initial"), "initial");
    return Model(std::move(g));
  }
  if (type == "hmm") {
    const int ns = int_field(doc, "num_states");
    auto transitions = prob_matrix(field(doc, "transitions"), "transitions");
    auto initial = prob_vector(field(doc, "initial_hidden"), "initial_hidden");
    const json& em = field(doc, "emissions");
    const std::string kind = field(em, "kind").get<std::string>();
    if (kind == "discrete") {
      Hmm h;
      h.num_states = ns;
      h.num_symbols = int_field(em, "num_symbols");
      h.transitions = std::move(transitions);
      h.initial_hidden = std::move(initial);
      h.emissions = prob_matrix(field(em, "probs"), "emissions");
      return Model(std::move(h));
    }
    if (kind == "gaussian") {
      // Gaussian-emission HMM == linear switching model with zero coefficients
      return load_gaussian(doc, ns, std::move(transitions), std::move(initial),
                           field(em, "means"), field(em, "covariances"), nullptr,
                           doc.contains("initial") ? &doc["initial"] : nullptr);
    }
    throw ModelError("unknown emission kind '" + kind + "'");
  }
  if (type == "discrete_switching") {
    DiscreteSwitching s;
    s.num_states = int_field(doc, "num_states");
    s.num_symbols = int_field(doc, "num_symbols");
    s.transitions = prob_matrix(field(doc, "transitions"), "transitions");
    const json& em = field(doc, "emissions");
    for (const auto& per_state : em) {
      auto table = prob_matrix(per_state, "emissions");
      s.emissions.insert(s.emissions.end(), table.begin(), table.end());
    }
    s.initial = prob_vector(field(doc, "initial"), "initial");
    return Model(std::move(s));
  }
  if (type == "gaussian_linear_switching") {
    const int ns = int_field(doc, "num_states");
    auto transitions = prob_matrix(field(doc, "transitions"), "transitions");
    const json& init = field(doc, "initial");
    auto initial_hidden = prob_vector(field(init, "hidden"), "initial hidden");
    const json& coeff = field(doc, "coefficients");
    return load_gaussian(doc, ns, std::move(transitions), std::move(initial_hidden),
                         field(doc, "noise_means"), field(doc, "noise_covariances"), &coeff, &init);
  }
  throw ModelError("unknown model type '" + type + "'");
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

}  // namespace pmm
