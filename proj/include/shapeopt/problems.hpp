#pragma once

#include <functional>
#include <string>

#include "shapeopt/optimizer.hpp"

namespace shapeopt {

// Closed-form functions are selected by registered tag names so configs stay
// plain text: "const:<value>", "zero", "ex1_target", "ex1_g0", "ex2_force",
// "ex2_target", "ex4_target", "ex4_g0".
std::function<double(double, double)> lookup_function(const std::string& tag);
bool is_known_function_tag(const std::string& tag);

struct RunConfig {
    int example_id = 0;  // 1..4 presets, 0 custom
    int grid_n = 128;
    double eps = 1e-5;
    double rho = 0.01;
    int n_samples = 100;
    std::uint64_t seed = 1234;
    DirectionMode direction = DirectionMode::simplified;
    ObjectiveKind objective = ObjectiveKind::on_O;
    SubdomainSpec subdomain;   // observation region O (on_O)
    SubdomainSpec constraint;  // projection region; kind none disables it
    std::string f_tag = "const:2";
    std::string ud_tag = "ex1_target";
    std::string g0_tag = "ex1_g0";
    OptimizerParams opt;
    bool resample = false;  // redraw the sample set every iteration
    int threads = 0;        // 0 = hardware concurrency
    std::string out_dir = "out";
};

RunConfig preset(int example_id);

// Flat key = value text; doubles use shortest round-trip decimal form so a
// parse-print cycle is bit-exact.
std::string config_to_string(const RunConfig& config);
RunConfig config_from_string(const std::string& text);
void write_config(const RunConfig& config, const std::string& path);
RunConfig parse_config_file(const std::string& path);

std::string direction_to_string(DirectionMode mode);
DirectionMode direction_from_string(const std::string& s);
std::string subdomain_to_string(const SubdomainSpec& spec);
SubdomainSpec subdomain_from_string(const std::string& s);

}  // namespace shapeopt
