#pragma once

#include <string>
#include <vector>

#include "shapeopt/mesh.hpp"
#include "shapeopt/optimizer.hpp"

namespace shapeopt {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

struct ContourPolyline {
    std::vector<Vec2> points;  // closed loops repeat the first point at the end
};

// Marching triangles on the P1 interpolant: one segment per sign-change
// triangle, stitched into polylines. Exact-zero vertices are classified with
// a +1e-30 perturbation so through-vertex cases are never degenerate.
std::vector<ContourPolyline> extract_zero_contour(const Mesh& mesh, const NodalVector& g);

// CSV "iter,cost,step,dcost,dg,seconds" plus a trailing
// "# termination=<reason>" comment line.
void write_history(const RunHistory& history, const std::string& path);
RunHistory parse_history(const std::string& path);

// CSV "x,y,g" per vertex plus a sibling contour file; filenames embed the
// iteration index zero-padded to 4 digits (shape_0016.csv, contour_0016.txt).
void write_field_snapshot(const Mesh& mesh, const NodalVector& g, int iter,
                          const std::string& dir);
// Same format under explicit paths (used for the final shape).
void write_field_csv(const Mesh& mesh, const NodalVector& g, const std::string& path);
void write_contour_file(const std::vector<ContourPolyline>& polylines, const std::string& path);
NodalVector read_field_csv(const std::string& path, std::vector<Vec2>* coords = nullptr);

std::string snapshot_name(int iter);
std::string contour_name(int iter);

}  // namespace shapeopt
