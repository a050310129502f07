#pragma once

#include "riesz/energy_measure.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace riesz {

// Shortest decimal that parses back to the same double; "inf" for +inf.
std::string format_double(double v);
// Accepts "inf"/"+inf"; FormatError on anything else that is not a number.
double parse_double(std::string_view token);

// Grid file: `dim nodes_x [nodes_y] lo_x hi_x [lo_y hi_y]`, then the node
// values in row-major order, one per line.
void write_grid(std::ostream& os, const GridFunction& phi);
GridFunction read_grid(std::istream& is);
void save_grid(const std::string& path, const GridFunction& phi);
GridFunction load_grid(const std::string& path);

// Measure file: `measure <euclidean|sphere> dim`, then `x [y] weight` lines.
void write_measure(std::ostream& os, const DiscreteMeasure& mu);
DiscreteMeasure read_measure(std::istream& is);
void save_measure(const std::string& path, const DiscreteMeasure& mu);
DiscreteMeasure load_measure(const std::string& path);

// Support file: `interval l r`, `whole dim`, or `polygon k` followed by k
// vertex lines `x y`.
void write_support(std::ostream& os, const SupportSet& k);
SupportSet read_support(std::istream& is);
SupportSet load_support(const std::string& path);

// Function records:
//   gaussian a [b]            e^{-a|x|^2/2 + b}
//   exponential b [c]         e^{-b|x| + c}
//   indicator [l,r] [m]       m 1_[l,r]; `[l,r]x[l,r]` for a box in 2-D
//   indicator <support-file> [m]
//   grid <grid-file>          e^{-phi} with phi from the file
// A bare path is read as a grid file. Relative file names resolve against
// `base_dir` when it is non-empty.
LogConcave parse_function(const std::string& record, int dim, const std::string& base_dir = "");
// Inverse of parse_function for centred analytic backings; grid backings
// and indicators of non-box sets are written to `side_file`, which the
// returned record then references.
std::string function_record(const LogConcave& f, const std::string& side_file);

}  // namespace riesz
