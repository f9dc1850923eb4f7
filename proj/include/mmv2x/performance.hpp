#pragma once

#include <limits>
#include <vector>

#include "mmv2x/model.hpp"

namespace mmv2x {

/// Throughput and delay contributions of one retained state.
struct StatePerf {
  Tier tier;
  AssociationState state;
  double weight;         // P^(n,m)_{i,k}
  double load;           // N^(n,m)_k
  double avg_rate;       // bit/s
  double avg_conn_time;  // s
  double throughput;     // bits per slot, avg_rate * avg_conn_time
};

struct PerfBreakdown {
  std::vector<StatePerf> states;
  double p_h = 0.0;
  double throughput_local = 0.0;  // T_Local, bits per slot
  double throughput_v2i = 0.0;    // T_V2I
  double throughput_v2v = 0.0;    // T_V2V
  double throughput_total = 0.0;  // sum of P_i T_i
  double delay_slots = 0.0;
};

inline constexpr double kInfiniteDelay = std::numeric_limits<double>::infinity();

/// (1 - p_h) S / T; 0 when p_h = 1, kInfiniteDelay when T = 0 otherwise.
double delay_slots(double p_h, double content_bits, double throughput);

PerfBreakdown evaluate_performance(const Model& model);

// Reference route, by direct adaptive quadrature.

/// E[R] for one state: W / (N ln 2) int_0^inf SC(u) / (1 + u) du.
double average_rate_direct(const ValidatedConfig& cfg, const InterferenceField& field, const CaseTable& table, Tier k,
                           AssociationState s, const NumericsPolicy& policy);

/// E[t] for one state: int connection_time(x) f_X(x) dx.
double average_connection_time_direct(const ValidatedConfig& cfg, Tier k, AssociationState s,
                                      const NumericsPolicy& policy);

}  // namespace mmv2x
