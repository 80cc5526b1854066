#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "ricci/field.hpp"
#include "ricci/geometry.hpp"
#include "ricci/iteration.hpp"

namespace ricci::io {

/// %.17g, or the literal null for non-finite values.
std::string number(double x);

/// One JSON object per line, in step order. An error trailer
/// {"record":"error",...} follows when error is set.
void write_trajectory_jsonl(std::ostream& out, const Trajectory& t, const std::optional<std::string>& error = {});

/// Header k,c0_increment,curvature_deviation,I,J,ding,k_energy,
/// positivity_margin,green_slack; missing values are empty cells.
void write_summary_csv(std::ostream& out, const Trajectory& t);

/// Self-contained SVG with log10 increment and curvature deviation curves.
void write_convergence_svg(std::ostream& out, const Trajectory& t);

void write_forward_jsonl(std::ostream& out, const ForwardTrajectory& t, std::optional<int> return_step);
void write_forward_csv(std::ostream& out, const ForwardTrajectory& t);

/// {"format":"ricci-field-v1","backend":{...},"values":[...]}.
void write_field(std::ostream& out, const Field& f);
/// Reads a field file; the stored backend must match backend's signature.
Field read_field(const std::string& text, const Backend& backend);

/// Writes text to path atomically enough for tests (truncate + write).
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace ricci::io
