#include "nbundle/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "nbundle/parallel.hpp"

namespace nbundle {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in the open interval (0, 1), built from raw engine bits.
Real uniform_open(std::mt19937_64& rng) {
  for (;;) {
    const Real u = static_cast<Real>(rng() >> 11) * 0x1.0p-53;
    if (u > 0) return u;
  }
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index));
}

TrajectoryEngine::TrajectoryEngine(const SystemParams& params, const HilbertSpace& space, Real sample_dt,
                                   int subdivision_levels)
    : space_(space), sample_dt_(sample_dt), levels_(subdivision_levels) {
  params.validate();
  if (!(sample_dt > 0)) throw InvalidArgument("sample_dt must be > 0");
  if (subdivision_levels < 1 || subdivision_levels > 52) throw InvalidArgument("subdivision levels out of range");

  const Operator h = build_hamiltonian(params, space);
  ComplexMatrix h_eff = h.matrix;
  for (const Channel& c : lindblad_channels(params, space)) {
    h_eff -= Complex(0.0, 0.5 * c.rate) * (c.op.matrix.adjoint() * c.op.matrix);
    jumps_.push_back({c.op.matrix, c.rate, c.kind});
  }
  propagators_.reserve(static_cast<std::size_t>(levels_ + 1));
  for (int k = 0; k <= levels_; ++k) {
    const ComplexMatrix gen = Complex(0.0, -sample_dt / std::ldexp(1.0, k)) * h_eff;
    propagators_.push_back(gen.exp());
  }
  number_ = build_operators(space).number.matrix;
}

EmissionRecord TrajectoryEngine::run(Real t_end, std::uint64_t seed, const TrajectoryOptions& options) const {
  if (!(t_end > 0)) throw InvalidArgument("t_end must be > 0");
  const long samples = std::max(1L, std::lround(t_end / sample_dt_));
  const std::uint64_t full = std::uint64_t{1} << levels_;
  const Real tick = sample_dt_ / static_cast<Real>(full);

  EmissionRecord rec;
  rec.seed = seed;
  rec.sample_dt = sample_dt_;
  rec.t_end = static_cast<Real>(samples) * sample_dt_;
  rec.photon_number.reserve(static_cast<std::size_t>(samples + 1));
  rec.time_averaged_probs = RealVector::Zero(space_.fock_dim());
  long averaged = 0;

  std::mt19937_64 rng(seed);
  ComplexVector psi = basis_ket(space_, options.initial_emitter, options.initial_photons);
  ComplexVector trial(psi.size());
  Real threshold = uniform_open(rng);

  auto sample = [&](long k) {
    const Real norm2 = psi.squaredNorm();
    rec.photon_number.push_back(std::real(psi.dot(number_ * psi)) / norm2);
    if (static_cast<Real>(k) * sample_dt_ >= options.burn_in) {
      const int fd = space_.fock_dim();
      for (int n = 0; n < fd; ++n) {
        rec.time_averaged_probs(n) += (std::norm(psi(n)) + std::norm(psi(fd + n))) / norm2;
      }
      ++averaged;
    }
  };

  auto jump = [&](Real t) {
    std::vector<Real> weights;
    weights.reserve(jumps_.size());
    Real total = 0;
    for (const Jump& j : jumps_) {
      const Real w = j.rate * (j.op * psi).squaredNorm();
      weights.push_back(w);
      total += w;
    }
    if (!(total > 0) || !std::isfinite(total)) {
      throw IntegratorFailure("norm threshold crossed with zero jump probability at t = " + std::to_string(t));
    }
    Real pick = uniform_open(rng) * total;
    std::size_t c = 0;
    while (c + 1 < weights.size() && pick > weights[c]) pick -= weights[c++];
    psi = jumps_[c].op * psi;
    psi /= psi.norm();
    switch (jumps_[c].kind) {
      case ChannelKind::cavity: rec.cavity_emissions.push_back(t); break;
      case ChannelKind::radiative: rec.radiative_emissions.push_back(t); break;
      case ChannelKind::dephasing: ++rec.dephasing_jumps; break;
    }
    threshold = uniform_open(rng);
  };

  sample(0);
  for (long k = 0; k < samples; ++k) {
    const Real t0 = static_cast<Real>(k) * sample_dt_;
    std::uint64_t pos = 0;  // ticks advanced inside this sample interval
    while (pos < full) {
      // Greedy descent over step sizes 2^(levels−j) ticks: keeps the largest
      // advance whose squared norm stays above the threshold.
      for (int j = 0; j <= levels_ && pos < full; ++j) {
        const std::uint64_t step = std::uint64_t{1} << (levels_ - j);
        if (pos + step > full) continue;
        trial.noalias() = propagators_[static_cast<std::size_t>(j)] * psi;
        const Real n2 = trial.squaredNorm();
        if (!std::isfinite(n2) || n2 < 1e-300) {
          throw IntegratorFailure("stochastic state norm underflow at t = " + std::to_string(t0));
        }
        if (n2 > threshold) {
          psi.swap(trial);
          pos += step;
          if (j == 0) break;
        }
      }
      if (pos < full) jump(t0 + static_cast<Real>(pos) * tick);
    }
    sample(k + 1);
  }
  if (averaged > 0) rec.time_averaged_probs /= static_cast<Real>(averaged);
  return rec;
}

EmissionRecord mcwf_run(const SystemParams& params, const HilbertSpace& space, Real t_end, std::uint64_t seed,
                        const TrajectoryOptions& options) {
  const Real dt = options.sample_dt > 0 ? options.sample_dt : t_end / 1000;
  const TrajectoryEngine engine(params, space, dt, options.subdivision_levels);
  return engine.run(t_end, seed, options);
}

std::vector<EmissionRecord> run_ensemble(const SystemParams& params, const HilbertSpace& space, Real t_end,
                                         std::uint64_t master_seed, std::size_t count, unsigned threads,
                                         const TrajectoryOptions& options) {
  const Real dt = options.sample_dt > 0 ? options.sample_dt : t_end / 1000;
  const TrajectoryEngine engine(params, space, dt, options.subdivision_levels);
  std::vector<EmissionRecord> out(count);
  parallel_for(count, threads,
               [&](std::size_t i) { out[i] = engine.run(t_end, trajectory_seed(master_seed, i), options); });
  return out;
}

Real default_gap_threshold(const SystemParams& params) {
  if (!(params.kappa > 0)) throw InvalidArgument("default gap threshold needs kappa > 0");
  return 3.0 / params.kappa;
}

BundleGrouping group_bundles(const EmissionRecord& record, Real gap_threshold) {
  if (!(gap_threshold > 0)) throw InvalidArgument("gap threshold must be > 0");
  BundleGrouping g{{}, gap_threshold};
  for (const Real t : record.cavity_emissions) {
    if (g.bundles.empty() || t - g.bundles.back().members.back() >= gap_threshold) {
      g.bundles.push_back({t, {t}});
    } else {
      g.bundles.back().members.push_back(t);
    }
  }
  return g;
}

EmpiricalStatistics empirical_statistics(const std::vector<EmissionRecord>& records, Real gap_threshold) {
  if (records.empty()) throw InvalidArgument("empirical statistics need at least one record");
  EmpiricalStatistics s;
  std::map<int, std::vector<std::vector<Real>>> gaps;

  Eigen::Index fd = 0;
  for (const EmissionRecord& r : records) fd = std::max(fd, r.time_averaged_probs.size());
  RealVector sum = RealVector::Zero(fd);
  RealVector sum_sq = RealVector::Zero(fd);

  for (const EmissionRecord& r : records) {
    const BundleGrouping g = group_bundles(r, gap_threshold);
    for (std::size_t b = 0; b < g.bundles.size(); ++b) {
      const auto& m = g.bundles[b].members;
      const int size = static_cast<int>(m.size());
      ++s.bundle_size_histogram[size];
      auto& per_k = gaps[size];
      per_k.resize(static_cast<std::size_t>(std::max(0, size - 1)));
      for (int k = 0; k + 1 < size; ++k) per_k[static_cast<std::size_t>(k)].push_back(m[k + 1] - m[k]);
      if (b > 0) s.bundle_start_intervals.push_back(g.bundles[b].start_time - g.bundles[b - 1].start_time);
    }
    s.cavity_photons += static_cast<long>(r.cavity_emissions.size());
    s.radiative_photons += static_cast<long>(r.radiative_emissions.size());
    s.total_time += r.t_end;

    RealVector p = RealVector::Zero(fd);
    p.head(r.time_averaged_probs.size()) = r.time_averaged_probs;
    sum += p;
    sum_sq += p.cwiseAbs2();
  }

  for (const auto& [size, per_k] : gaps) {
    auto& out = s.intra_bundle_waiting[size];
    for (const auto& v : per_k) {
      WaitingStats w;
      w.count = static_cast<long>(v.size());
      if (w.count > 0) {
        for (const Real x : v) w.mean += x;
        w.mean /= static_cast<Real>(w.count);
        Real var = 0;
        for (const Real x : v) var += (x - w.mean) * (x - w.mean);
        w.stddev = w.count > 1 ? std::sqrt(var / static_cast<Real>(w.count - 1)) : 0.0;
      }
      out.push_back(w);
    }
  }

  const Real n = static_cast<Real>(records.size());
  s.time_averaged_probs = sum / n;
  s.time_averaged_probs_stderr = RealVector::Zero(fd);
  if (records.size() > 1) {
    const RealVector var = ((sum_sq - n * s.time_averaged_probs.cwiseAbs2()) / (n - 1)).cwiseMax(0.0);
    s.time_averaged_probs_stderr = (var / n).cwiseSqrt();
  }
  return s;
}

EnsembleAverage ensemble_photon_number(const std::vector<EmissionRecord>& records) {
  if (records.empty()) throw InvalidArgument("ensemble average needs at least one record");
  const std::size_t len = records.front().photon_number.size();
  for (const auto& r : records) {
    if (r.photon_number.size() != len) throw DimensionMismatch("records use different sample grids");
  }
  EnsembleAverage out;
  const Real n = static_cast<Real>(records.size());
  for (std::size_t k = 0; k < len; ++k) {
    Real s = 0, s2 = 0;
    for (const auto& r : records) {
      s += r.photon_number[k];
      s2 += r.photon_number[k] * r.photon_number[k];
    }
    const Real mean = s / n;
    const Real var = records.size() > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1)) : 0.0;
    out.times.push_back(static_cast<Real>(k) * records.front().sample_dt);
    out.mean.push_back(mean);
    out.stderr_.push_back(std::sqrt(var / n));
  }
  return out;
}

}  // namespace nbundle
