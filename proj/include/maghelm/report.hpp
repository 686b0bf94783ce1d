#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maghelm/model.hpp"

namespace maghelm::report {

enum class Format { csv, json, svg };
const char* to_string(Format f);
Format format_from_string(const std::string& s);

/// Where a row came from; stamped on every emitted row.
struct Provenance {
  std::string spec_hash;
  int mesh_nodes = 0;
  std::string solver = "fd";
};

struct Row {
  EstimateReport report;
  Provenance origin;
};

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Canonical order: kind, then lambda, epsilon, sign, d, r_min, r_max, mode_cutoff, then extras.
void canonical_sort(std::vector<Row>& rows);

/// Full-precision decimal (17 significant digits, '.' separator); non-finite values spelled out.
std::string number(double x);

/// Sorted copy emitted in one pass. csv: header + one row each; json: array of key-sorted objects;
/// svg: ratio against lambda per kind.
std::string emit_report(std::vector<Row> rows, Format format);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct Plot {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  std::vector<Series> series;
};

/// Self-contained SVG line plot with axes, ticks and a legend.
std::string svg_plot(const Plot& plot);

}  // namespace maghelm::report
