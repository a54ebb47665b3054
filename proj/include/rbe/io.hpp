#pragma once

#include "rbe/solver.hpp"
#include "rbe/verify.hpp"

#include <iosfwd>
#include <string>

namespace rbe::io {

/// SolveReport as stable JSON: barrier segments (inf as the strings used in
/// the CSV), per-step diagnostics, exhaustion flags (null = never).
std::string solve_report_to_json(const SolveReport& rep);

std::string embed_report_to_json(const EmbedReport& rep);

/// Plot-ready long-format CSV: curve,x,y,se with one row per point. Contains
/// the empirical CDF and the E(tau ^ T) curve(s).
void write_curves_csv(std::ostream& os, const EmbedReport& rep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace rbe::io
