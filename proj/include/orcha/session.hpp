#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "orcha/chart_model.hpp"
#include "orcha/config.hpp"
#include "orcha/render.hpp"

namespace orcha {

/// Attributes for a stream created as a side effect of an edit.
struct NewStream {
  std::optional<std::string> id;
  std::string color;
  std::optional<std::string> parent;
};

struct AddStream {
  Time t0 = 0.0;
  Time t1 = 0.0;
  NewStream stream;
};

/// Link between two entities. When exactly one endpoint is missing the edit
/// also creates a stream for it: dragging from empty space into stream B
/// yields a new stream over [t0, max(t0, t1 - step)] that links into B at t1;
/// dragging from stream A into empty space yields a new stream over
/// [min(t0 + step, t1), t1] fed from A at t0.
struct AddLink {
  std::optional<std::string> from;
  Time t0 = 0.0;
  std::optional<std::string> to;
  std::optional<Time> t1;
  bool merge = false;
  LinkStyle style = LinkStyle::ribbon;
  NewStream stream;
};

struct SetSizeAt {
  std::string stream;
  Time t = 0.0;
  double size = 0.0;
};

struct AddLabel {
  LabelDef label;
};

/// Streams are addressed by id; links and labels by their 0-based table
/// position. Deleting a stream also deletes its nested streams and every
/// link and label attached to any of them.
struct DeleteEntity {
  Table kind = Table::streams;
  std::string id;
};

struct ReplaceCsv {
  Table table = Table::streams;
  std::string text;
};

/// Discards warm-start state and lays the current chart out from scratch.
struct Relayout {};

using EditOp = std::variant<AddStream, AddLink, SetSizeAt, AddLabel, DeleteEntity, ReplaceCsv, Relayout>;

/// Throws std::invalid_argument for malformed or unknown ops.
EditOp edit_op_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EditOp& op);

/// Pure spec transformation. Returns the edited spec, or the violations that
/// make the edit unacceptable.
std::variant<ChartSpec, std::vector<Violation>> apply_op(const ChartSpec& spec, const EditOp& op,
                                                          Time step);

struct EditResult {
  bool accepted = false;
  std::uint64_t revision = 0;
  std::vector<Violation> violations;
  std::size_t ticks = 0;  // layout ticks spent on the edit
};

/// One authored chart with its layout and a linear revision log. Not
/// thread-safe; ChartService serializes access.
class Session {
 public:
  /// Lays the spec out from scratch as revision 0. Throws ValidationError.
  Session(ChartSpec spec, Config config);

  EditResult apply(const EditOp& op);

  std::uint64_t revision() const { return history_.size() - 1; }
  const ChartSpec& spec() const { return history_.back().spec; }
  const ChartLayout& layout() const { return history_.back().layout; }
  const Config& config() const { return config_; }

  SvgDocument svg() const;
  /// Rendering of an earlier revision; nullopt if it never existed.
  std::optional<SvgDocument> svg_at(std::uint64_t revision) const;

  nlohmann::json layout_json() const;

 private:
  struct Snapshot {
    ChartSpec spec;
    ChartLayout layout;
  };

  Config config_;
  std::vector<Snapshot> history_;
};

nlohmann::json spec_to_json(const ChartSpec& spec);
nlohmann::json violations_to_json(const std::vector<Violation>& violations);
nlohmann::json layout_to_json(const LayoutGraph& graph, const SimulationState& state);

}  // namespace orcha
