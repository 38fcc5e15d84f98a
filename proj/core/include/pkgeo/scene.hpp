#pragma once

// Scene files and reports. A scene is a JSON document naming a chart, a set
// of objects (curves, potentials, immersions, ambient surfaces) and a list of
// analysis requests; running it produces a JSON report with per-request
// scalars and checks, plus per-cell grids for CSV export. Reports depend
// only on the scene, the options and the library version.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkgeo/verify.hpp"

namespace pkgeo {

std::string_view version() noexcept;

/// Command-line overrides; unset fields fall back to the scene, then to the
/// library defaults.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<int> grid;
  std::optional<double> tol_null;
  std::optional<int> quad_order;
  /// Run only requests of these kinds (all when empty).
  std::vector<std::string> kinds;
};

/// One grid of per-cell values, written as CSV with header `s,t,<columns>`.
struct Grid {
  std::string name;
  std::vector<std::string> columns;
  /// Rows of s, t followed by one value per column.
  std::vector<std::vector<double>> rows;

  std::string csv() const;
};

struct Report {
  std::string json;
  std::vector<Grid> grids;
  bool passed = false;
  int failed_checks = 0;
};

class Scene {
 public:
  /// Throws ParseError for malformed JSON, unknown fields or names, bad
  /// expressions and empty domains; GeometryError or DomainError when an
  /// object cannot be built on its chart.
  static Scene parse(std::string_view json_text);
  static Scene load(const std::filesystem::path& path);

  const std::string& name() const noexcept;
  std::vector<std::string> object_names() const;

  /// A copy of the scene with its request list replaced by `requests_json`
  /// (a JSON array in the scene request format).
  Scene with_requests(std::string_view requests_json) const;

  Report run(const RunOptions& options = {}) const;

  struct Impl;  // opaque

 private:
  explicit Scene(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Report for suites run outside a scene, in the same format.
Report suite_report(std::string_view name, const std::vector<SuiteResult>& suites,
                    const SuiteOptions& options);

}  // namespace pkgeo
