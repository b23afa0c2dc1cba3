#pragma once

// JSON file formats. Complex numbers are [re, im] pairs; a wave evaluation is
// a row-major list of 2n*N pairs (nested per-row lists are accepted on read).
//
//   {"format": "cfslab.cfs", "version": 1, "n": 2, "N": 8,
//    "weights": [...], "points": [[[re, im], ...], ...],
//    "tolerances": {"rel_eq": ..., ...}}            (tolerances optional)
//
// Syntax errors are reported with line and column, schema errors with the
// JSON path of the offending value.

#include <string>

#include "cfslab/core.hpp"
#include "cfslab/minkowski.hpp"
#include "cfslab/observables.hpp"
#include "cfslab/sweep.hpp"

namespace cfslab {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

DiscreteCFS parse_cfs(const std::string& text);
std::string format_cfs(const DiscreteCFS& cfs);
DiscreteCFS load_cfs(const std::string& path);
void save_cfs(const std::string& path, const DiscreteCFS& cfs);

/// {"format": "cfslab.region", "version": 1, "indices": [...]}
Region parse_region(const std::string& text);
std::string format_region(const Region& r);

/// {"format": "cfslab.subsystem", "version": 1, "N": ..,
///  "vectors": [[[re, im], ...], ...], "orthonormalize": false}
Subsystem parse_subsystem(const std::string& text);
std::string format_subsystem(const Subsystem& s);

/// Keys: m, eps_list, box_len, sigma, integrand, threads, record_timing,
/// quad {rel_tol, inner_rel_tol, base_panels, max_depth, max_panels}.
/// Missing keys keep their defaults; unknown keys are rejected.
SweepConfig parse_sweep_config(const std::string& text);
std::string format_sweep_config(const SweepConfig& cfg);

/// Keys: box_len, k_cut, m, eps_soft, max_entries, threads, and either
/// lattice [[t, x, y, z], ...] or grid {origin: [4], spacing: [4], counts: [4]}.
SeaSampleConfig parse_sea_config(const std::string& text);

std::string format_fit(const FitResult& fit, const SweepResult& res, const SweepConfig* cfg);

}  // namespace cfslab
