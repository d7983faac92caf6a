#include "dpdp/policies.hpp"

#include <algorithm>
#include <stdexcept>

namespace dpdp {

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Cfa: return "cfa";
    case PolicyKind::Dsp: return "dsp";
    case PolicyKind::Liml: return "liml";
  }
  return "?";
}

PolicyKind parse_policy_kind(const std::string& text) {
  if (text == "cfa") return PolicyKind::Cfa;
  if (text == "dsp") return PolicyKind::Dsp;
  if (text == "liml") return PolicyKind::Liml;
  throw std::invalid_argument("unknown policy '" + text + "' (expected cfa, dsp or liml)");
}

std::string PolicySpec::label() const {
  switch (kind) {
    case PolicyKind::Cfa: return "CFA";
    case PolicyKind::Dsp: return "DSP";
    case PolicyKind::Liml: return "LIML-" + std::to_string(liml_m);
  }
  return "?";
}

CfaPolicy::CfaPolicy(const ScenarioConfig& config, const CfaParams& params) : engine_(config, [&] {
  CfaParams p = params;
  p.mode = MasterMode::SetPacking;
  return p;
}()) {}

Decision CfaPolicy::decide(const State& state) { return engine_.decide(state); }

namespace {

CfaParams dsp_params(CfaParams p) {
  p.mode = MasterMode::SetPartitioning;
  p.beta = 0;
  return p;
}

CfaParams liml_params(CfaParams p, int m) {
  if (m < 1) throw std::invalid_argument("LIML path size must be at least 1");
  p.mode = MasterMode::SetPacking;
  p.beta = kLimlBeta;
  p.max_path_requests = m;
  return p;
}

}  // namespace

DspPolicy::DspPolicy(const ScenarioConfig& config, CfaParams params) : engine_(config, dsp_params(std::move(params))) {}

Decision DspPolicy::decide(const State& state) { return engine_.decide(state); }

LimlPolicy::LimlPolicy(const ScenarioConfig& config, CfaParams params, int m)
    : m_(m), engine_(config, liml_params(std::move(params), m)) {}

Decision LimlPolicy::decide(const State& state) {
  const std::size_t idle = state.idle_vehicles().size();
  if (idle == 0 || state.unassigned.empty()) return {};
  if (m_ == 1) return greedy_assign_all(state, state.unassigned, engine_.context(), 1);

  std::vector<Request> candidates = state.unassigned;
  std::stable_sort(candidates.begin(), candidates.end(), [](const Request& a, const Request& b) {
    return std::tie(a.deadline, a.id) < std::tie(b.deadline, b.id);
  });
  const std::size_t keep = std::min(candidates.size(), static_cast<std::size_t>(m_) * idle);
  candidates.resize(keep);
  return engine_.decide(state, candidates);
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const ScenarioConfig& config, std::uint64_t seed) {
  CfaParams p = spec.params;
  p.seed = seed;
  switch (spec.kind) {
    case PolicyKind::Cfa: return std::make_unique<CfaPolicy>(config, p);
    case PolicyKind::Dsp: return std::make_unique<DspPolicy>(config, p);
    case PolicyKind::Liml: return std::make_unique<LimlPolicy>(config, p, spec.liml_m);
  }
  throw std::invalid_argument("unknown policy kind");
}

const std::vector<EpochTrace>* policy_trace(Policy& policy) {
  if (auto* p = dynamic_cast<CfaPolicy*>(&policy)) return &p->engine().trace();
  if (auto* p = dynamic_cast<DspPolicy*>(&policy)) return &p->engine().trace();
  if (auto* p = dynamic_cast<LimlPolicy*>(&policy)) return &p->engine().trace();
  return nullptr;
}

}  // namespace dpdp
