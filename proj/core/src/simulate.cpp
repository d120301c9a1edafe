#include "pmm/simulate.hpp"

#include <vector>

#include "pmm/rng.hpp"

namespace pmm {

namespace {

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

// walks the cumulative sum in index order; the last cell absorbs rounding
int sample_categorical(const double* probs, int count, double u) {
  double cum = 0;
  for (int i = 0; i < count - 1; ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return count - 1;
}

Eigen::VectorXd sample_normal(const RandomStream& rng, long long step, int dim) {
  Eigen::VectorXd z(dim);
  for (int i = 0; i < dim; i += 2) {
    double z0, z1;
    rng.normal_pair(static_cast<std::uint64_t>(step), 2 + 2 * static_cast<std::uint64_t>(i / 2), z0, z1);
    z[i] = z0;
    if (i + 1 < dim) z[i + 1] = z1;
  }
  return z;
}

}  // namespace

Trajectory simulate(const Model& model, long long steps, std::uint64_t seed) {
  if (steps < 1) throw ModelError("steps must be >= 1");
  const RandomStream rng(seed);
  const int ns = model.num_states();
  Trajectory traj;
  traj.hidden.reserve(static_cast<std::size_t>(steps));

  switch (model.family()) {
    case Model::Family::GenericDiscrete:
    case Model::Family::DiscreteSwitching: {
      const GenericDiscrete g = model.to_generic();
      const int nz = g.num_symbols * g.num_states;
      const auto initial = to_doubles(g.initial);
      const auto kernel = to_doubles(g.kernel);
      std::vector<int> xs;
      xs.reserve(static_cast<std::size_t>(steps));
      int z = sample_categorical(initial.data(), nz, rng.uniform(1, 0));
      xs.push_back(z / ns + 1);
      traj.hidden.push_back(z % ns + 1);
      for (long long t = 2; t <= steps; ++t) {
        z = sample_categorical(&kernel[static_cast<std::size_t>(z) * nz], nz,
                               rng.uniform(static_cast<std::uint64_t>(t), 0));
        xs.push_back(z / ns + 1);
        traj.hidden.push_back(z % ns + 1);
      }
      traj.observations = ObsSeq::discrete(std::move(xs));
      return traj;
    }
    case Model::Family::Hmm: {
      const auto& h = model.as_hmm();
      const int nx = h.num_symbols;
      const auto pi = to_doubles(h.initial_hidden);
      const auto trans = to_doubles(h.transitions);
      const auto emis = to_doubles(h.emissions);
      std::vector<int> xs;
      xs.reserve(static_cast<std::size_t>(steps));
      int y = sample_categorical(pi.data(), ns, rng.uniform(1, 0));
      xs.push_back(sample_categorical(&emis[static_cast<std::size_t>(y) * nx], nx, rng.uniform(1, 1)) + 1);
      traj.hidden.push_back(y + 1);
      for (long long t = 2; t <= steps; ++t) {
        y = sample_categorical(&trans[static_cast<std::size_t>(y) * ns], ns,
                               rng.uniform(static_cast<std::uint64_t>(t), 0));
        xs.push_back(sample_categorical(&emis[static_cast<std::size_t>(y) * nx], nx,
                                        rng.uniform(static_cast<std::uint64_t>(t), 1)) +
                     1);
        traj.hidden.push_back(y + 1);
      }
      traj.observations = ObsSeq::discrete(std::move(xs));
      return traj;
    }
    case Model::Family::GaussianLinearSwitching: {
      const auto& m = model.as_glm();
      const int d = m.dim;
      const auto pi = to_doubles(m.initial_hidden);
      const auto trans = to_doubles(m.transitions);
      std::vector<Eigen::MatrixXd> noise_chol(ns), init_chol(ns);
      for (int j = 0; j < ns; ++j) {
        noise_chol[j] = Eigen::LLT<Eigen::MatrixXd>(m.noise_cov[j]).matrixL();
        init_chol[j] = Eigen::LLT<Eigen::MatrixXd>(m.init_cov[j]).matrixL();
      }
      std::vector<Eigen::VectorXd> xs;
      xs.reserve(static_cast<std::size_t>(steps));
      int y = sample_categorical(pi.data(), ns, rng.uniform(1, 0));
      Eigen::VectorXd x = m.init_mean[y] + init_chol[y] * sample_normal(rng, 1, d);
      xs.push_back(x);
      traj.hidden.push_back(y + 1);
      for (long long t = 2; t <= steps; ++t) {
        y = sample_categorical(&trans[static_cast<std::size_t>(y) * ns], ns,
                               rng.uniform(static_cast<std::uint64_t>(t), 0));
        x = m.coeff[y] * x + m.noise_mean[y] + noise_chol[y] * sample_normal(rng, t, d);
        xs.push_back(x);
        traj.hidden.push_back(y + 1);
      }
      traj.observations = ObsSeq::euclidean(std::move(xs));
      return traj;
    }
  }
  throw ModelError("unreachable");
}

}  // namespace pmm
