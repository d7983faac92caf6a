#pragma once

#include "dpdp/cfa.hpp"
#include "dpdp/simulation.hpp"

#include <memory>
#include <string>

namespace dpdp {

enum class PolicyKind { Cfa, Dsp, Liml };

const char* to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& text);

/// Everything needed to instantiate one policy for one episode.
struct PolicySpec {
  PolicyKind kind = PolicyKind::Cfa;
  CfaParams params;  // alpha and engine knobs; beta ignored by DSP, overridden by LIML
  int liml_m = 1;

  std::string label() const;
};

inline constexpr double kLimlBeta = 1e6;

/// Cost-function approximation: set packing with urgency charges.
class CfaPolicy : public Policy {
 public:
  CfaPolicy(const ScenarioConfig& config, const CfaParams& params);
  Decision decide(const State& state) override;
  std::string name() const override { return "CFA"; }
  CfaEngine& engine() { return engine_; }

 private:
  CfaEngine engine_;
};

/// Direct scheduling: set partitioning with big-M slacks, assigns everything
/// as soon as a vehicle idles.
class DspPolicy : public Policy {
 public:
  DspPolicy(const ScenarioConfig& config, CfaParams params);
  Decision decide(const State& state) override;
  std::string name() const override { return "DSP"; }
  CfaEngine& engine() { return engine_; }

 private:
  CfaEngine engine_;
};

/// Limited-length paths: the m * #idle earliest-deadline requests, at most m
/// per path, urgency-dominated.
class LimlPolicy : public Policy {
 public:
  LimlPolicy(const ScenarioConfig& config, CfaParams params, int m);
  Decision decide(const State& state) override;
  std::string name() const override { return "LIML-" + std::to_string(m_); }
  CfaEngine& engine() { return engine_; }

 private:
  int m_;
  CfaEngine engine_;
};

/// `seed` replaces params.seed so each episode gets its own pricing stream.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const ScenarioConfig& config, std::uint64_t seed);

/// Trace of the engine behind `policy`, or nullptr for policies without one.
const std::vector<EpochTrace>* policy_trace(Policy& policy);

}  // namespace dpdp
