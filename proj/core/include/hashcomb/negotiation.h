// Copyright 2026 The Hash-Comb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HASHCOMB_NEGOTIATION_H_
#define HASHCOMB_NEGOTIATION_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hashcomb/prime_field.h"
#include "hashcomb/quantization.h"
#include "hashcomb/secret_sharing.h"

namespace hashcomb {

// Lifecycle of one party; transitions only move forward.
enum class NegotiationPhase { kIdle, kRangeSharing, kSetup, kParamSharing, kDone };

// Protocol step a message belongs to, in protocol order.
enum class ProtocolStep {
  kCoordinatorElection,
  kLocalRangeSharing,
  kQuantizationSetup,
  kHyperParameterSharing,
};

std::string_view PhaseName(NegotiationPhase phase);
std::string_view StepName(ProtocolStep step);

class PhaseViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ProtocolMessage {
  int round = 0;
  int sender = 0;
  int receiver = 0;
  ProtocolStep step = ProtocolStep::kCoordinatorElection;
  std::vector<std::uint8_t> payload;
};

// One audit record per message; the payload itself is never logged.
struct TranscriptRecord {
  int round;
  int sender;
  int receiver;
  ProtocolStep step;
  std::string payload_digest;  // hex SHA-256
};

// Ordered, reliable, in-memory delivery between parties 1..n.
class InMemoryTransport {
 public:
  explicit InMemoryTransport(int parties);

  void Send(ProtocolMessage message);
  // Pending messages for the receiver, in send order.
  std::vector<ProtocolMessage> Drain(int receiver);
  // Removes and returns only the messages of `round`; later rounds stay
  // queued. Throws PhaseViolation if an earlier round is still pending.
  std::vector<ProtocolMessage> Drain(int receiver, int round);

  const std::vector<TranscriptRecord>& transcript() const { return transcript_; }

 private:
  std::vector<std::deque<ProtocolMessage>> inboxes_;
  std::vector<TranscriptRecord> transcript_;
};

struct NegotiationOptions {
  int threshold = 1;  // t; any t + 1 parties reconstruct
  int max_level = kDefaultMaxLevel;
  double target_mean_level = 8.0;
  std::optional<double> selection_p;  // overrides target_mean_level
  std::optional<double> delta;        // default (x_max - x_min) / 2
  std::uint64_t modulus = kMersenne61;
};

struct LocalRange {
  double x_min;
  double x_max;
};

// State owned by one simulated party.
class NegotiationParty {
 public:
  NegotiationParty(int id, int parties, LocalRange range);

  int id() const { return id_; }
  NegotiationPhase phase() const { return phase_; }
  const std::optional<QuantizationScheme>& scheme() const { return scheme_; }
  std::optional<int> coordinator() const { return coordinator_; }
  // Global [x_min, x_max] before enlargement; valid once phase() is kDone.
  LocalRange agreed_range() const { return agreed_range_; }

  // Election: share x_max, then open the received shares to everybody.
  void ShareMaximum(InMemoryTransport& transport, const NegotiationOptions& opt,
                    std::mt19937_64& rng);
  void OpenMaximumShares(InMemoryTransport& transport);
  // Reconstructs every x_max_i and elects the largest (lowest id on ties).
  int ElectCoordinator(InMemoryTransport& transport,
                       const NegotiationOptions& opt);
  // Range sharing: share x_min, then send the held shares to the
  // coordinator only.
  void ShareMinimum(InMemoryTransport& transport, const NegotiationOptions& opt,
                    std::mt19937_64& rng);
  void ForwardMinimumShares(InMemoryTransport& transport);
  // Coordinator only: fixes L, Delta, p and the salt, announces L.
  void SetUpQuantization(InMemoryTransport& transport,
                         const NegotiationOptions& opt, std::mt19937_64& rng);
  // Non-coordinators: consume the set-up announcement.
  void AcceptSetup(InMemoryTransport& transport);
  // Coordinator only: shares the hyper-parameters.
  void ShareHyperParameters(InMemoryTransport& transport,
                            const NegotiationOptions& opt, std::mt19937_64& rng);
  void OpenHyperParameterShares(InMemoryTransport& transport);
  // Reconstructs the hyper-parameters and builds the scheme.
  const QuantizationScheme& Finish(InMemoryTransport& transport,
                                   const NegotiationOptions& opt);

 private:
  void Require(NegotiationPhase expected, std::string_view action) const;
  void Advance(NegotiationPhase next);

  int id_;
  int parties_;
  LocalRange range_;
  NegotiationPhase phase_ = NegotiationPhase::kIdle;

  std::vector<std::uint64_t> held_max_shares_;  // index = sender - 1
  std::vector<std::uint64_t> held_min_shares_;
  std::vector<std::uint64_t> held_param_shares_;
  std::optional<int> coordinator_;
  std::optional<double> global_max_;
  int announced_max_level_ = 0;
  std::optional<QuantizationScheme> scheme_;
  LocalRange agreed_range_{0.0, 0.0};
  std::vector<double> pending_params_;  // coordinator scratch
  Salt pending_salt_{};
};

struct NegotiationResult {
  std::vector<QuantizationScheme> schemes;  // one per party, in id order
  int coordinator = 0;
  double global_x_min = 0.0;
  double global_x_max = 0.0;
  std::vector<TranscriptRecord> transcript;
};

// Runs the full protocol among ranges.size() parties (ids 1..n). Requires
// n >= 2t + 1. Throws std::invalid_argument on bad options.
NegotiationResult RunNegotiation(std::span<const LocalRange> ranges,
                                 const NegotiationOptions& options,
                                 std::mt19937_64& rng);

}  // namespace hashcomb

#endif  // HASHCOMB_NEGOTIATION_H_
