#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ofsc/config.hpp"
#include "ofsc/detector.hpp"
#include "ofsc/knowledge.hpp"
#include "ofsc/observer.hpp"

namespace ofsc {

struct TraceRecord {
  int step = 0;
  double time = 0;
  Vec x;
  double y = 0;
  OutputId yq = -1;
  Vec u;
  InputId uq = -1;           // applied lattice input id (not emitted to CSV)
  std::string mode;          // prefix | kappa | active | refusal
  double aux = 0;            // knowledge size, or observer error norm
};

// Abstract-output-symbol target sets obtained from the config's concrete
// intervals through Z with the configured snapping.
std::vector<std::vector<OutputId>> snap_targets(const CaseStudyConfig& cfg,
                                                const SymbolicModel& model);

Spec make_spec(const CaseStudyConfig& cfg, const SymbolicModel& model);

// Everything synthesize produces for one case study.
struct SynthesisResult {
  Controller controller;                   // observations: model states, or game states
  std::optional<KnowledgeGame> game;       // knowledge method only
  Spec spec;
};

SynthesisResult synthesize(const CaseStudyConfig& cfg, const SymbolicModel& model);

std::vector<TraceRecord> simulate_closed_loop(const CaseStudyConfig& cfg,
                                              const SymbolicModel& model,
                                              const SynthesisResult& syn);

struct MonitorVerdict {
  bool pass = false;
  size_t first_violation = 0;  // record index; trace size when never satisfied
  int cycles = 0;              // completed alternation rounds (RecurrenceHold)
};

MonitorVerdict monitor_spec(const std::vector<TraceRecord>& trace, const Spec& spec,
                            const CaseStudyConfig& cfg);

// Columns: step,time,x1..xn,y,yq,u1..um,mode,aux; 12 significant digits.
void emit_csv(const std::vector<TraceRecord>& trace, std::ostream& os);
std::vector<TraceRecord> read_csv(std::istream& is);

// Theorem-2 replay: the trace's symbol sequence under its applied inputs is
// an external behavior of the abstract model. Returns the first step where
// the inclusion breaks, or nullopt when it holds throughout.
std::optional<size_t> trace_inclusion_breakpoint(const SymbolicModel& model,
                                                 const std::vector<TraceRecord>& trace);

}  // namespace ofsc
