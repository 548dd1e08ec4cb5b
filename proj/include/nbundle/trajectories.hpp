#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nbundle/model.hpp"

namespace nbundle {

/// Time-tagged quantum jumps of one Monte-Carlo wavefunction trajectory.
struct EmissionRecord {
  std::vector<Real> cavity_emissions;     // jumps of the a channel
  std::vector<Real> radiative_emissions;  // jumps of the σ₋ channel
  Real t_end = 0;
  std::uint64_t seed = 0;
  long dephasing_jumps = 0;  // never counted as emissions

  // Stochastic-state samples on the grid k·sample_dt, k = 0..K.
  Real sample_dt = 0;
  std::vector<Real> photon_number;   // <a†a> of the normalized state
  RealVector time_averaged_probs;    // mean P(n) over samples with t ≥ burn_in
};

struct TrajectoryOptions {
  Real sample_dt = 0;  // 0 → t_end/1000
  Real burn_in = 0;    // samples before this time are excluded from the time average
  Emitter initial_emitter = Emitter::G;
  int initial_photons = 0;
  int subdivision_levels = 32;  // jump times resolved to sample_dt/2^levels
};

/// Propagators of the non-Hermitian effective Hamiltonian
/// H_eff = H − (i/2) Σ Γ O†O, shared by all trajectories of an ensemble.
class TrajectoryEngine {
 public:
  TrajectoryEngine(const SystemParams& params, const HilbertSpace& space, Real sample_dt,
                   int subdivision_levels = 32);

  /// Waiting-time (norm-threshold) unraveling from the chosen initial basis
  /// state up to `t_end`, which is rounded to a whole number of samples.
  EmissionRecord run(Real t_end, std::uint64_t seed, const TrajectoryOptions& options = {}) const;

  const HilbertSpace& space() const { return space_; }
  Real sample_dt() const { return sample_dt_; }

 private:
  struct Jump {
    ComplexMatrix op;
    Real rate;
    ChannelKind kind;
  };

  HilbertSpace space_;
  Real sample_dt_;
  int levels_;
  std::vector<ComplexMatrix> propagators_;  // exp(−i H_eff sample_dt / 2^k)
  std::vector<Jump> jumps_;
  ComplexMatrix number_;
};

/// Single trajectory; convenience wrapper around TrajectoryEngine.
EmissionRecord mcwf_run(const SystemParams& params, const HilbertSpace& space, Real t_end, std::uint64_t seed,
                        const TrajectoryOptions& options = {});

/// Per-trajectory seed derived from (master_seed, index) by a splitmix64 hash.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

/// `count` independent trajectories, index i seeded by trajectory_seed(master_seed, i).
/// Output order and content do not depend on `threads`.
std::vector<EmissionRecord> run_ensemble(const SystemParams& params, const HilbertSpace& space, Real t_end,
                                         std::uint64_t master_seed, std::size_t count, unsigned threads,
                                         const TrajectoryOptions& options = {});

struct Bundle {
  Real start_time;
  std::vector<Real> members;
};

struct BundleGrouping {
  std::vector<Bundle> bundles;
  Real gap_threshold;
};

/// 3/κ.
Real default_gap_threshold(const SystemParams& params);

/// Single-linkage clustering of cavity emissions: a gap ≥ threshold starts a new bundle.
BundleGrouping group_bundles(const EmissionRecord& record, Real gap_threshold);

struct WaitingStats {
  long count = 0;
  Real mean = 0;
  Real stddev = 0;
};

struct EmpiricalStatistics {
  std::map<int, long> bundle_size_histogram;
  // intra_bundle_waiting[N][k]: gap between photon k and k+1 inside size-N bundles.
  std::map<int, std::vector<WaitingStats>> intra_bundle_waiting;
  RealVector time_averaged_probs;
  RealVector time_averaged_probs_stderr;  // spread across records / √records
  std::vector<Real> bundle_start_intervals;
  long cavity_photons = 0;
  long radiative_photons = 0;
  Real total_time = 0;
};

EmpiricalStatistics empirical_statistics(const std::vector<EmissionRecord>& records, Real gap_threshold);

struct EnsembleAverage {
  std::vector<Real> times;
  std::vector<Real> mean;
  std::vector<Real> stderr_;
};

/// Ensemble mean and standard error of <a†a>(t) on the shared sample grid.
EnsembleAverage ensemble_photon_number(const std::vector<EmissionRecord>& records);

}  // namespace nbundle
