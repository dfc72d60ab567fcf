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

#include "hashcomb/negotiation.h"

#include <cmath>
#include <string>

#include "byte_io.h"
#include "hashcomb/digest.h"

namespace hashcomb {
namespace {

// Message rounds of the simulated protocol.
constexpr int kRoundShareMax = 1;
constexpr int kRoundOpenMax = 2;
constexpr int kRoundShareMin = 3;
constexpr int kRoundForwardMin = 4;
constexpr int kRoundSetup = 5;
constexpr int kRoundShareParams = 6;
constexpr int kRoundOpenParams = 7;

// x_min, x_max, delta, p, then four 32-bit salt limbs.
constexpr std::size_t kRealParams = 4;
constexpr std::size_t kSaltLimbs = 4;
constexpr std::size_t kParamElements = kRealParams + kSaltLimbs;

std::vector<std::uint8_t> PackElements(std::span<const std::uint64_t> values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * 8);
  for (std::uint64_t v : values) internal::PutU64(out, v);
  return out;
}

std::vector<std::uint64_t> UnpackElements(std::span<const std::uint8_t> bytes,
                                          std::size_t expected) {
  internal::ByteReader reader(bytes);
  std::vector<std::uint64_t> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < expected; ++i) out.push_back(reader.U64());
  if (!reader.done()) {
    throw std::invalid_argument("protocol payload has trailing bytes");
  }
  return out;
}

// Takes the `round` messages from the inbox and checks that there are
// exactly `count` of them, returned indexed by sender - 1.
std::vector<std::vector<std::uint8_t>> Collect(InMemoryTransport& transport,
                                               int receiver, int parties,
                                               int round, int count) {
  std::vector<std::vector<std::uint8_t>> by_sender(parties);
  int seen = 0;
  for (ProtocolMessage& m : transport.Drain(receiver, round)) {
    by_sender.at(m.sender - 1) = std::move(m.payload);
    ++seen;
  }
  if (seen != count) {
    throw PhaseViolation("party " + std::to_string(receiver) + " expected " +
                         std::to_string(count) + " messages in round " +
                         std::to_string(round) + ", got " +
                         std::to_string(seen));
  }
  return by_sender;
}

std::uint64_t ReconstructColumn(
    const std::vector<std::vector<std::uint64_t>>& rows, std::size_t column,
    int t, std::uint64_t modulus) {
  ShareSet shares;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].empty()) continue;
    shares.push_back({j + 1, rows[j].at(column), modulus});
  }
  return Reconstruct(shares, t, modulus);
}

}  // namespace

std::string_view PhaseName(NegotiationPhase phase) {
  switch (phase) {
    case NegotiationPhase::kIdle:
      return "idle";
    case NegotiationPhase::kRangeSharing:
      return "range_sharing";
    case NegotiationPhase::kSetup:
      return "setup";
    case NegotiationPhase::kParamSharing:
      return "param_sharing";
    case NegotiationPhase::kDone:
      return "done";
  }
  return "unknown";
}

std::string_view StepName(ProtocolStep step) {
  switch (step) {
    case ProtocolStep::kCoordinatorElection:
      return "coordinator_election";
    case ProtocolStep::kLocalRangeSharing:
      return "local_range_sharing";
    case ProtocolStep::kQuantizationSetup:
      return "quantization_setup";
    case ProtocolStep::kHyperParameterSharing:
      return "hyper_parameter_sharing";
  }
  return "unknown";
}

InMemoryTransport::InMemoryTransport(int parties) : inboxes_(parties) {}

void InMemoryTransport::Send(ProtocolMessage message) {
  if (message.receiver < 1 ||
      message.receiver > static_cast<int>(inboxes_.size()) ||
      message.sender < 1 || message.sender > static_cast<int>(inboxes_.size())) {
    throw std::invalid_argument("message addressed outside the party set");
  }
  transcript_.push_back({message.round, message.sender, message.receiver,
                         message.step, ToHex(Sha256(message.payload))});
  inboxes_[message.receiver - 1].push_back(std::move(message));
}

std::vector<ProtocolMessage> InMemoryTransport::Drain(int receiver) {
  auto& inbox = inboxes_.at(receiver - 1);
  std::vector<ProtocolMessage> out(std::make_move_iterator(inbox.begin()),
                                   std::make_move_iterator(inbox.end()));
  inbox.clear();
  return out;
}

std::vector<ProtocolMessage> InMemoryTransport::Drain(int receiver, int round) {
  auto& inbox = inboxes_.at(receiver - 1);
  std::vector<ProtocolMessage> out;
  std::vector<ProtocolMessage> keep;
  for (ProtocolMessage& m : inbox) {
    if (m.round < round) {
      throw PhaseViolation("party " + std::to_string(receiver) +
                           " expected round " + std::to_string(round) +
                           " but got round " + std::to_string(m.round));
    }
    (m.round == round ? out : keep).push_back(std::move(m));
  }
  inbox.assign(std::make_move_iterator(keep.begin()),
               std::make_move_iterator(keep.end()));
  return out;
}

NegotiationParty::NegotiationParty(int id, int parties, LocalRange range)
    : id_(id), parties_(parties), range_(range) {}

void NegotiationParty::Require(NegotiationPhase expected,
                               std::string_view action) const {
  if (phase_ != expected) {
    throw PhaseViolation("party " + std::to_string(id_) + " cannot " +
                         std::string(action) + " in phase " +
                         std::string(PhaseName(phase_)));
  }
}

void NegotiationParty::Advance(NegotiationPhase next) {
  if (static_cast<int>(next) != static_cast<int>(phase_) + 1) {
    throw PhaseViolation("illegal phase transition " +
                         std::string(PhaseName(phase_)) + " -> " +
                         std::string(PhaseName(next)));
  }
  phase_ = next;
}

void NegotiationParty::ShareMaximum(InMemoryTransport& transport,
                                    const NegotiationOptions& opt,
                                    std::mt19937_64& rng) {
  Require(NegotiationPhase::kIdle, "share its maximum");
  const ShareSet shares = ShareSecret(EncodeFixed(range_.x_max, opt.modulus),
                                      opt.threshold, parties_, opt.modulus, rng);
  held_max_shares_.assign(parties_, 0);
  for (const Share& s : shares) {
    const int to = static_cast<int>(s.party_id);
    if (to == id_) {
      held_max_shares_[id_ - 1] = s.value;
      continue;
    }
    const std::uint64_t v = s.value;
    transport.Send({kRoundShareMax, id_, to, ProtocolStep::kCoordinatorElection,
                    PackElements(std::span(&v, 1))});
  }
  Advance(NegotiationPhase::kRangeSharing);
}

void NegotiationParty::OpenMaximumShares(InMemoryTransport& transport) {
  Require(NegotiationPhase::kRangeSharing, "open maximum shares");
  auto received = Collect(transport, id_, parties_, kRoundShareMax, parties_ - 1);
  for (int j = 1; j <= parties_; ++j) {
    if (j == id_) continue;
    held_max_shares_[j - 1] = UnpackElements(received[j - 1], 1)[0];
  }
  const auto payload = PackElements(held_max_shares_);
  for (int k = 1; k <= parties_; ++k) {
    if (k == id_) continue;
    transport.Send(
        {kRoundOpenMax, id_, k, ProtocolStep::kCoordinatorElection, payload});
  }
}

int NegotiationParty::ElectCoordinator(InMemoryTransport& transport,
                                       const NegotiationOptions& opt) {
  Require(NegotiationPhase::kRangeSharing, "elect a coordinator");
  auto received = Collect(transport, id_, parties_, kRoundOpenMax, parties_ - 1);
  std::vector<std::vector<std::uint64_t>> rows(parties_);
  for (int j = 1; j <= parties_; ++j) {
    rows[j - 1] = j == id_ ? held_max_shares_
                           : UnpackElements(received[j - 1], parties_);
  }
  int best = 0;
  double best_max = 0.0;
  for (int i = 1; i <= parties_; ++i) {
    const double x_max = DecodeFixed(
        ReconstructColumn(rows, i - 1, opt.threshold, opt.modulus), opt.modulus);
    if (best == 0 || x_max > best_max) {
      best = i;
      best_max = x_max;
    }
  }
  coordinator_ = best;
  global_max_ = best_max;
  return best;
}

void NegotiationParty::ShareMinimum(InMemoryTransport& transport,
                                    const NegotiationOptions& opt,
                                    std::mt19937_64& rng) {
  Require(NegotiationPhase::kRangeSharing, "share its minimum");
  if (!coordinator_) throw PhaseViolation("no coordinator elected yet");
  const ShareSet shares = ShareSecret(EncodeFixed(range_.x_min, opt.modulus),
                                      opt.threshold, parties_, opt.modulus, rng);
  held_min_shares_.assign(parties_, 0);
  for (const Share& s : shares) {
    const int to = static_cast<int>(s.party_id);
    if (to == id_) {
      held_min_shares_[id_ - 1] = s.value;
      continue;
    }
    const std::uint64_t v = s.value;
    transport.Send({kRoundShareMin, id_, to, ProtocolStep::kLocalRangeSharing,
                    PackElements(std::span(&v, 1))});
  }
}

void NegotiationParty::ForwardMinimumShares(InMemoryTransport& transport) {
  Require(NegotiationPhase::kRangeSharing, "forward minimum shares");
  auto received = Collect(transport, id_, parties_, kRoundShareMin, parties_ - 1);
  for (int j = 1; j <= parties_; ++j) {
    if (j == id_) continue;
    held_min_shares_[j - 1] = UnpackElements(received[j - 1], 1)[0];
  }
  if (id_ != *coordinator_) {
    transport.Send({kRoundForwardMin, id_, *coordinator_,
                    ProtocolStep::kLocalRangeSharing,
                    PackElements(held_min_shares_)});
  }
}

void NegotiationParty::SetUpQuantization(InMemoryTransport& transport,
                                         const NegotiationOptions& opt,
                                         std::mt19937_64& rng) {
  Require(NegotiationPhase::kRangeSharing, "set up quantization");
  if (!coordinator_ || *coordinator_ != id_) {
    throw PhaseViolation("only the coordinator sets up quantization");
  }
  auto received =
      Collect(transport, id_, parties_, kRoundForwardMin, parties_ - 1);
  std::vector<std::vector<std::uint64_t>> rows(parties_);
  for (int j = 1; j <= parties_; ++j) {
    rows[j - 1] = j == id_ ? held_min_shares_
                           : UnpackElements(received[j - 1], parties_);
  }
  double global_min = 0.0;
  for (int i = 1; i <= parties_; ++i) {
    const double x_min = DecodeFixed(
        ReconstructColumn(rows, i - 1, opt.threshold, opt.modulus), opt.modulus);
    if (i == 1 || x_min < global_min) global_min = x_min;
  }
  Advance(NegotiationPhase::kSetup);

  const double global_max = *global_max_;
  const double delta = opt.delta.value_or((global_max - global_min) / 2.0);
  const double p = opt.selection_p.has_value()
                       ? *opt.selection_p
                       : SolveBias(opt.target_mean_level, opt.max_level);
  pending_params_ = {global_min, global_max, delta, p};
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& b : pending_salt_) b = static_cast<std::uint8_t>(byte(rng));
  announced_max_level_ = opt.max_level;

  const std::uint64_t announced = static_cast<std::uint64_t>(opt.max_level);
  for (int k = 1; k <= parties_; ++k) {
    if (k == id_) continue;
    transport.Send({kRoundSetup, id_, k, ProtocolStep::kQuantizationSetup,
                    PackElements(std::span(&announced, 1))});
  }
}

void NegotiationParty::AcceptSetup(InMemoryTransport& transport) {
  Require(NegotiationPhase::kRangeSharing, "accept the set-up");
  auto received = Collect(transport, id_, parties_, kRoundSetup, 1);
  announced_max_level_ =
      static_cast<int>(UnpackElements(received.at(*coordinator_ - 1), 1)[0]);
  Advance(NegotiationPhase::kSetup);
}

void NegotiationParty::ShareHyperParameters(InMemoryTransport& transport,
                                            const NegotiationOptions& opt,
                                            std::mt19937_64& rng) {
  Require(NegotiationPhase::kSetup, "share hyper-parameters");
  if (*coordinator_ != id_) {
    throw PhaseViolation("only the coordinator shares hyper-parameters");
  }
  std::vector<std::uint64_t> secrets;
  for (double v : pending_params_) secrets.push_back(EncodeFixed(v, opt.modulus));
  for (std::size_t limb = 0; limb < kSaltLimbs; ++limb) {
    std::uint64_t value = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      value = (value << 8) | pending_salt_[limb * 4 + b];
    }
    secrets.push_back(value);
  }
  // per_party[j] holds party j's share of every secret.
  std::vector<std::vector<std::uint64_t>> per_party(
      parties_, std::vector<std::uint64_t>(kParamElements));
  for (std::size_t e = 0; e < kParamElements; ++e) {
    const ShareSet shares =
        ShareSecret(secrets[e], opt.threshold, parties_, opt.modulus, rng);
    for (const Share& s : shares) per_party[s.party_id - 1][e] = s.value;
  }
  held_param_shares_ = per_party[id_ - 1];
  for (int k = 1; k <= parties_; ++k) {
    if (k == id_) continue;
    transport.Send({kRoundShareParams, id_, k,
                    ProtocolStep::kHyperParameterSharing,
                    PackElements(per_party[k - 1])});
  }
  Advance(NegotiationPhase::kParamSharing);
}

void NegotiationParty::OpenHyperParameterShares(InMemoryTransport& transport) {
  if (id_ != *coordinator_) {
    Require(NegotiationPhase::kSetup, "open hyper-parameter shares");
    auto received = Collect(transport, id_, parties_, kRoundShareParams, 1);
    held_param_shares_ =
        UnpackElements(received.at(*coordinator_ - 1), kParamElements);
    Advance(NegotiationPhase::kParamSharing);
  }
  Require(NegotiationPhase::kParamSharing, "open hyper-parameter shares");
  const auto payload = PackElements(held_param_shares_);
  for (int k = 1; k <= parties_; ++k) {
    if (k == id_) continue;
    transport.Send({kRoundOpenParams, id_, k,
                    ProtocolStep::kHyperParameterSharing, payload});
  }
}

const QuantizationScheme& NegotiationParty::Finish(
    InMemoryTransport& transport, const NegotiationOptions& opt) {
  Require(NegotiationPhase::kParamSharing, "finish");
  auto received =
      Collect(transport, id_, parties_, kRoundOpenParams, parties_ - 1);
  std::vector<std::vector<std::uint64_t>> rows(parties_);
  for (int j = 1; j <= parties_; ++j) {
    rows[j - 1] = j == id_ ? held_param_shares_
                           : UnpackElements(received[j - 1], kParamElements);
  }
  std::vector<double> reals;
  for (std::size_t e = 0; e < kRealParams; ++e) {
    reals.push_back(DecodeFixed(
        ReconstructColumn(rows, e, opt.threshold, opt.modulus), opt.modulus));
  }
  Salt salt{};
  for (std::size_t limb = 0; limb < kSaltLimbs; ++limb) {
    const std::uint64_t value =
        ReconstructColumn(rows, kRealParams + limb, opt.threshold, opt.modulus);
    for (std::size_t b = 0; b < 4; ++b) {
      salt[limb * 4 + b] = static_cast<std::uint8_t>(value >> (8 * (3 - b)));
    }
  }
  agreed_range_ = {reals[0], reals[1]};
  scheme_ = QuantizationScheme::FromSourceRange(
      reals[0], reals[1], reals[2], announced_max_level_, reals[3], salt);
  Advance(NegotiationPhase::kDone);
  return *scheme_;
}

NegotiationResult RunNegotiation(std::span<const LocalRange> ranges,
                                 const NegotiationOptions& options,
                                 std::mt19937_64& rng) {
  const int n = static_cast<int>(ranges.size());
  if (n < 1) throw std::invalid_argument("negotiation needs at least 1 party");
  if (options.threshold < 0 || n < 2 * options.threshold + 1) {
    throw std::invalid_argument(
        "honest majority requires n >= 2t + 1 (n=" + std::to_string(n) +
        ", t=" + std::to_string(options.threshold) + ")");
  }
  for (const LocalRange& r : ranges) {
    if (!std::isfinite(r.x_min) || !std::isfinite(r.x_max) ||
        r.x_min > r.x_max) {
      throw std::invalid_argument("invalid local range");
    }
  }
  InMemoryTransport transport(n);
  std::vector<NegotiationParty> parties;
  for (int i = 1; i <= n; ++i) parties.emplace_back(i, n, ranges[i - 1]);

  for (auto& p : parties) p.ShareMaximum(transport, options, rng);
  for (auto& p : parties) p.OpenMaximumShares(transport);
  int coordinator = 0;
  for (auto& p : parties) coordinator = p.ElectCoordinator(transport, options);
  for (auto& p : parties) p.ShareMinimum(transport, options, rng);
  for (auto& p : parties) p.ForwardMinimumShares(transport);
  NegotiationParty& lead = parties[coordinator - 1];
  lead.SetUpQuantization(transport, options, rng);
  for (auto& p : parties) {
    if (p.id() != coordinator) p.AcceptSetup(transport);
  }
  lead.ShareHyperParameters(transport, options, rng);
  for (auto& p : parties) p.OpenHyperParameterShares(transport);

  NegotiationResult result;
  for (auto& p : parties) result.schemes.push_back(p.Finish(transport, options));
  result.coordinator = coordinator;
  result.global_x_min = parties.front().agreed_range().x_min;
  result.global_x_max = parties.front().agreed_range().x_max;
  result.transcript = transport.transcript();
  return result;
}

}  // namespace hashcomb
