#pragma once

#include <iosfwd>
#include <vector>

#include "aoii/dr_dph.hpp"
#include "aoii/polynomial.hpp"
#include "aoii/stochastic.hpp"

namespace aoii {

// Irreducible DTMC source with one AoII penalty polynomial per state.
// Penalties must be nonnegative on positive integer ages (spot-checked) with
// degree <= 8, and every state needs an escape probability (q_jj < 1).
class SourceModel {
 public:
  SourceModel(Matrix q, std::vector<Polynomial> penalties);

  const StochasticMatrix& q() const { return q_; }
  int num_states() const { return q_.size(); }
  const Polynomial& penalty(int j) const {
    return penalties_[static_cast<size_t>(j)];
  }
  const std::vector<Polynomial>& penalties() const { return penalties_; }

 private:
  StochasticMatrix q_;
  std::vector<Polynomial> penalties_;
};

// Forward channel: a DPH(gamma, G) delay with M transient phases and
// per-phase delivery probabilities h = 1 - G 1.
class ChannelModel {
 public:
  ChannelModel(RowVector gamma, Matrix g);

  const DphDistribution& delay() const { return delay_; }
  const RowVector& gamma() const { return delay_.ipv; }
  const Matrix& g() const { return delay_.tpts.entries(); }
  const ColVector& h() const { return delay_.absorption; }
  int phases() const { return delay_.order(); }

 private:
  DphDistribution delay_;
};

// Blocks of the per-(j, tau) cycle chain. Regime 1 tracks the source state
// alone while the estimate is pinned at j; its transient space is the N-1
// states i != j in ascending order. Regime 2 additionally tracks the channel
// phase; its transient space is (i, m), phase-minor, same state order. The
// absorbing space is E_1 .. E_N: "sync re-established at value l".

struct Regime1Blocks {
  RowVector ipv;  // conditional first-mismatch distribution
  Matrix tpts;
  Matrix apts;
};

Regime1Blocks regime1_blocks(const SourceModel& source, int j);

// Delivery requires the source to hold its value for the slot, so the
// absorbing entry to E_i is q_ii * h_m (kRequireSourceHold). The variant
// (1 - q_ii) * h_m pairs delivery with a source move instead; it does not
// yield stochastic rows and the chain constructor rejects it. Kept for the
// validation tests.
enum class DeliveryAbsorption { kRequireSourceHold, kComplementScaled };

struct Regime2Blocks {
  Matrix tpts;
  Matrix apts;
};

Regime2Blocks regime2_blocks(const SourceModel& source,
                             const ChannelModel& channel, int j,
                             DeliveryAbsorption mode =
                                 DeliveryAbsorption::kRequireSourceHold);

// I_{N-1} (x) gamma: phase injection at the regime switch.
Matrix boundary_matrix(const ChannelModel& channel, int num_states);

// The assembled absorbing chain for estimate j under threshold tau, together
// with its distribution view.
struct CycleChain {
  int ev;
  int threshold;
  DualRegimeChain chain;
  DrDphDistribution dist;
};

CycleChain build_cycle_chain(const SourceModel& source,
                             const ChannelModel& channel, int j, int tau);

// E[sum_{t=1}^{T} f(t)]: expected accumulated age penalty over one excursion.
double age_cost(const CycleChain& cycle, const Polynomial& f);

// E[H_j] + E[T]: expected sync sojourn plus excursion length.
double duration(const CycleChain& cycle, const SourceModel& source);

// Expected number of transmitting slots in one excursion.
double transmission_cost(const CycleChain& cycle);

// Distribution of the next estimate value; entry j is both computed as the
// complement and cross-checked against sigma1 + sigma2.
RowVector transition_row(const CycleChain& cycle);

// The full SMDP parameter tables for tau in 1..tau_max. rho[j] stores
// transition rows stacked by tau. Costs assemble later as age + lambda * tx.
struct SmdpParameters {
  int num_states = 0;
  int tau_max = 0;
  Matrix age;   // N x tau_max
  Matrix tx;    // N x tau_max
  Matrix dur;   // N x tau_max
  std::vector<Matrix> rho;  // per state: tau_max x N

  double age_cost(int j, int tau) const { return age(j, tau - 1); }
  double tx_cost(int j, int tau) const { return tx(j, tau - 1); }
  double duration(int j, int tau) const { return dur(j, tau - 1); }
  RowVector transition_row(int j, int tau) const {
    return rho[static_cast<size_t>(j)].row(tau - 1);
  }
};

SmdpParameters smdp_parameters(const SourceModel& source,
                               const ChannelModel& channel, int tau_max);

// CSV dump, one row per (j, tau), 1-based labels, provenance comments first.
void write_smdp_parameters_csv(std::ostream& os, const SmdpParameters& params);

}  // namespace aoii
