#pragma once

#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pmm/domain.hpp"
#include "pmm/errors.hpp"
#include "pmm/obs.hpp"
#include "pmm/rational.hpp"

namespace pmm {

struct StateSpace {
  int count = 0;  // states labeled 1..count; label 1 is the anchor state
};

struct ObservationSpace {
  enum class Kind { Discrete, Euclidean };
  Kind kind = Kind::Discrete;
  int symbol_count = 0;  // Discrete: symbols 1..symbol_count
  int dim = 0;           // Euclidean
};

// ---------------------------------------------------------------------------
// Model families. Probabilities are stored as exact rationals (as parsed
// from the document) with cached per-entry log doubles built on validation.

// Full joint kernel on (x, y) pairs. z index = (x-1)*num_states + (y-1).
struct GenericDiscrete {
  int num_symbols = 0;
  int num_states = 0;
  std::vector<Rational> kernel;   // (nx*ns)^2 row-major, kernel[z_prev][z_next]
  std::vector<Rational> initial;  // nx*ns
};

// Factorized q(x,j|x',i) = p_ij f_j(x); initial p(x,y) = pi_y f_y(x).
struct Hmm {
  int num_states = 0;
  int num_symbols = 0;
  std::vector<Rational> transitions;     // ns*ns
  std::vector<Rational> emissions;       // ns*nx, f_j(x) at [(j-1)*nx + (x-1)]
  std::vector<Rational> initial_hidden;  // ns
};

// q(x,j|x',i) = p_ij f_j(x|x'); joint initial over (x,y).
struct DiscreteSwitching {
  int num_states = 0;
  int num_symbols = 0;
  std::vector<Rational> transitions;  // ns*ns
  std::vector<Rational> emissions;    // ns*nx*nx, f_j(x|x') at ((j-1)*nx + (x'-1))*nx + (x-1)
  std::vector<Rational> initial;      // joint nx*ns, z index as GenericDiscrete
};

// X_k = F(Y_k) X_{k-1} + xi_k(Y_k) with Gaussian noise xi(j) ~ N(mu_j, Sigma_j).
// Initial: Y_1 ~ initial_hidden, X_1 | Y_1=j ~ N(init_mean[j], init_cov[j])
// (standard normal by default).
struct GaussianLinearSwitching {
  int num_states = 0;
  int dim = 0;
  std::vector<Rational> transitions;        // ns*ns
  std::vector<Eigen::MatrixXd> coeff;       // F(j), d x d
  std::vector<Eigen::VectorXd> noise_mean;  // mu_j
  std::vector<Eigen::MatrixXd> noise_cov;   // Sigma_j, SPD
  std::vector<Rational> initial_hidden;     // ns
  std::vector<Eigen::VectorXd> init_mean;   // per state
  std::vector<Eigen::MatrixXd> init_cov;    // per state, SPD
};

// ---------------------------------------------------------------------------

class Model {
 public:
  enum class Family { GenericDiscrete, Hmm, DiscreteSwitching, GaussianLinearSwitching };

  explicit Model(GenericDiscrete m);
  explicit Model(Hmm m);
  explicit Model(DiscreteSwitching m);
  explicit Model(GaussianLinearSwitching m);

  Family family() const { return family_; }
  int num_states() const { return states_.count; }
  const StateSpace& states() const { return states_; }
  const ObservationSpace& obs_space() const { return obs_; }
  bool discrete() const { return obs_.kind == ObservationSpace::Kind::Discrete; }
  // exact-rational arithmetic available (all-discrete parameters)
  bool exact_capable() const { return discrete(); }

  const GenericDiscrete& as_generic() const;
  const Hmm& as_hmm() const;
  const DiscreteSwitching& as_switching() const;
  const GaussianLinearSwitching& as_glm() const;

  // log q(x,y | x_prev,y_prev); symbols/states 1-based. Out-of-range discrete
  // symbols are legal and have zero density.
  double kernel_log(int x_prev, int y_prev, int x, int y) const;
  double kernel_log(const Eigen::VectorXd& x_prev, int y_prev, const Eigen::VectorXd& x, int y) const;
  double initial_log(int x, int y) const;
  double initial_log(const Eigen::VectorXd& x, int y) const;

  Rational kernel_exact(int x_prev, int y_prev, int x, int y) const;
  Rational initial_exact(int x, int y) const;

  // Transition-step matrix for a DP over hidden states: out is ns*ns
  // row-major with out[(y_prev-1)*ns + (y-1)] = weight of obs[t-1] -> obs[t],
  // 2 <= t <= obs.size(). initial_vector fills the t=1 column.
  template <class D>
  void step_matrix(const ObsSeq& obs, int t, typename D::Weight* out) const {
    if constexpr (std::is_same_v<D, LogDomain>) {
      step_matrix_log(obs, t, out);
    } else {
      step_matrix_exact(obs, t, out);
    }
  }
  template <class D>
  void initial_vector(const ObsSeq& obs, typename D::Weight* out) const {
    if constexpr (std::is_same_v<D, LogDomain>) {
      initial_vector_log(obs, out);
    } else {
      initial_vector_exact(obs, out);
    }
  }

  void step_matrix_log(const ObsSeq& obs, int t, double* out) const;
  void step_matrix_exact(const ObsSeq& obs, int t, Rational* out) const;
  void initial_vector_log(const ObsSeq& obs, double* out) const;
  void initial_vector_exact(const ObsSeq& obs, Rational* out) const;

  // Hidden-chain transition probabilities p_ij. For switching families this
  // is the stored matrix; for GenericDiscrete it is not defined (throws).
  const std::vector<Rational>& hidden_transitions() const;

  // Lossless view of any discrete family as a joint kernel.
  GenericDiscrete to_generic() const;

 private:
  void validate_and_cache();

  Family family_;
  StateSpace states_;
  ObservationSpace obs_;

  std::optional<GenericDiscrete> generic_;
  std::optional<Hmm> hmm_;
  std::optional<DiscreteSwitching> switching_;
  std::optional<GaussianLinearSwitching> glm_;

  // cached log tables mirroring the rational parameters
  std::vector<double> log_kernel_;
  std::vector<double> log_initial_;
  std::vector<double> log_transitions_;
  std::vector<double> log_emissions_;
  // Gaussian caches: inverse covariances and log-normalizers
  std::vector<Eigen::MatrixXd> noise_prec_;
  std::vector<double> noise_norm_;
  std::vector<Eigen::MatrixXd> init_prec_;
  std::vector<double> init_norm_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> noise_chol_;  // for simulation
  std::vector<Eigen::LLT<Eigen::MatrixXd>> init_chol_;
};

// ---------------------------------------------------------------------------
// Two-state construction: X and Y are both two-state chains with transition
// matrix [[p,1-p],[q,1-q]]; the joint kernel is the 4x4 matrix parameterized
// by (lambda1, lambda2, mu1, mu2), each constrained to an interval determined
// by p and q. build_two_state_pmm materializes the joint kernel exactly.
struct TwoStatePmmParams {
  Rational p, q;
  Rational lambda1, lambda2, mu1, mu2;
};
Model build_two_state_pmm(const TwoStatePmmParams& params);

// ---------------------------------------------------------------------------
// Pairing transform: regroup Z = (X,Y) into Z' = ((X_{2k-1},X_{2k}),
// (Y_{2k-1},Y_{2k})). The paired hidden alphabet keeps only consecutive
// state pairs that can occur; hidden_labels maps new labels to old pairs.
struct PairedModel {
  Model model;
  std::vector<std::pair<int, int>> hidden_labels;  // new label (1-based) -> (i,j)
};
PairedModel pair_model(const Model& model);

// ---------------------------------------------------------------------------
// JSON document loading. See README for the schema; probabilities are
// decimal or fraction strings so exact-rational mode stays exact.
Model load_model(const std::string& json_text);
Model load_model_file(const std::string& path);

}  // namespace pmm
