#include "shapeopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "shapeopt/io.hpp"

namespace shapeopt {

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace

std::function<double(double, double)> lookup_function(const std::string& tag) {
    if (tag.rfind("const:", 0) == 0) {
        const double v = parse_double(tag.substr(6));
        return [v](double, double) { return v; };
    }
    if (tag == "zero") return [](double, double) { return 0.0; };
    if (tag == "ex1_target")
        return [](double x, double y) {
            return -(x - 0.5) * (x - 0.5) - (y - 0.5) * (y - 0.5) + 0.125;
        };
    if (tag == "ex1_g0") return [](double x, double y) { return 7.0 / 8.0 - x * x - y * y; };
    if (tag == "ex2_force")
        return [](double x, double y) {
            return 2.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y) + 1.0;
        };
    if (tag == "ex2_target")
        return [](double x, double y) { return -std::sin(pi * x) * std::sin(pi * y); };
    if (tag == "ex4_target")
        return [](double x, double y) {
            return -(x - 0.25) * (x - 0.25) - (y - 0.25) * (y - 0.25) + 0.04;
        };
    if (tag == "ex4_g0")
        return [](double x, double y) {
            const double r2 = x * x + y * y;
            return std::min({1.0 - r2, r2 - 1.0 / 64.0,
                             (x - 0.5) * (x - 0.5) + y * y - 1.0 / 16.0});
        };
    throw std::invalid_argument("unknown function tag: " + tag);
}

bool is_known_function_tag(const std::string& tag) {
    try {
        lookup_function(tag);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

RunConfig preset(int example_id) {
    RunConfig cfg;
    cfg.example_id = example_id;
    switch (example_id) {
        case 1:
            cfg.direction = DirectionMode::simplified;
            cfg.objective = ObjectiveKind::on_O;
            cfg.subdomain = SubdomainSpec::square(0.5);
            cfg.constraint = SubdomainSpec::square(0.5);
            cfg.f_tag = "const:2";
            cfg.ud_tag = "ex1_target";
            cfg.g0_tag = "ex1_g0";
            break;
        case 2:
            cfg.direction = DirectionMode::simplified;
            cfg.objective = ObjectiveKind::on_O;
            cfg.subdomain = SubdomainSpec::square(0.5);
            cfg.constraint = SubdomainSpec::square(0.5);
            cfg.f_tag = "ex2_force";
            cfg.ud_tag = "ex2_target";
            cfg.g0_tag = "ex1_g0";
            break;
        case 3:
            cfg.direction = DirectionMode::simplified;
            cfg.objective = ObjectiveKind::on_O;
            cfg.subdomain = SubdomainSpec::disk(0.5);
            cfg.constraint = SubdomainSpec::disk(0.5);
            cfg.f_tag = "ex2_force";
            cfg.ud_tag = "ex2_target";
            cfg.g0_tag = "ex1_g0";
            break;
        case 4:
            cfg.direction = DirectionMode::reduced;
            cfg.objective = ObjectiveKind::on_K;
            cfg.subdomain = SubdomainSpec::none();
            cfg.constraint = SubdomainSpec::none();
            cfg.f_tag = "const:2";
            cfg.ud_tag = "ex4_target";
            cfg.g0_tag = "ex4_g0";
            break;
        default:
            throw std::invalid_argument("preset: example_id must be 1..4, got " +
                                        std::to_string(example_id));
    }
    return cfg;
}

std::string direction_to_string(DirectionMode mode) {
    switch (mode) {
        case DirectionMode::full: return "full";
        case DirectionMode::simplified: return "simplified";
        case DirectionMode::reduced: return "reduced";
    }
    throw std::logic_error("direction_to_string: bad mode");
}

DirectionMode direction_from_string(const std::string& s) {
    if (s == "full") return DirectionMode::full;
    if (s == "simplified") return DirectionMode::simplified;
    if (s == "reduced") return DirectionMode::reduced;
    throw std::invalid_argument("unknown direction mode: " + s);
}

std::string subdomain_to_string(const SubdomainSpec& spec) {
    switch (spec.kind) {
        case SubdomainKind::none: return "none";
        case SubdomainKind::square:
            return "square:" + format_double(spec.size) + ":" + format_double(spec.center.x) +
                   ":" + format_double(spec.center.y);
        case SubdomainKind::disk:
            return "disk:" + format_double(spec.size) + ":" + format_double(spec.center.x) +
                   ":" + format_double(spec.center.y);
    }
    throw std::logic_error("subdomain_to_string: bad kind");
}

SubdomainSpec subdomain_from_string(const std::string& s) {
    if (s == "none") return SubdomainSpec::none();
    const auto parts = split(s, ':');
    if (parts.size() != 4)
        throw std::invalid_argument("bad subdomain spec: " + s);
    const double size = parse_double(parts[1]);
    const Vec2 c{parse_double(parts[2]), parse_double(parts[3])};
    if (parts[0] == "square") return SubdomainSpec::square(size, c);
    if (parts[0] == "disk") return SubdomainSpec::disk(size, c);
    throw std::invalid_argument("bad subdomain kind: " + parts[0]);
}

namespace {

std::string objective_to_string(ObjectiveKind kind) {
    return kind == ObjectiveKind::on_O ? "on_O" : "on_K";
}

ObjectiveKind objective_from_string(const std::string& s) {
    if (s == "on_O") return ObjectiveKind::on_O;
    if (s == "on_K") return ObjectiveKind::on_K;
    throw std::invalid_argument("unknown objective: " + s);
}

}  // namespace

std::string config_to_string(const RunConfig& c) {
    std::ostringstream os;
    os << "example = " << c.example_id << "\n";
    os << "grid_n = " << c.grid_n << "\n";
    os << "eps = " << format_double(c.eps) << "\n";
    os << "rho = " << format_double(c.rho) << "\n";
    os << "n_samples = " << c.n_samples << "\n";
    os << "seed = " << c.seed << "\n";
    os << "direction = " << direction_to_string(c.direction) << "\n";
    os << "objective = " << objective_to_string(c.objective) << "\n";
    os << "subdomain = " << subdomain_to_string(c.subdomain) << "\n";
    os << "constraint = " << subdomain_to_string(c.constraint) << "\n";
    os << "f = " << c.f_tag << "\n";
    os << "ud = " << c.ud_tag << "\n";
    os << "g0 = " << c.g0_tag << "\n";
    os << "alpha_min = " << format_double(c.opt.alpha_min) << "\n";
    os << "alpha_max = " << format_double(c.opt.alpha_max) << "\n";
    os << "armijo_c = " << format_double(c.opt.armijo_c) << "\n";
    os << "momentum_beta = " << format_double(c.opt.momentum_beta) << "\n";
    os << "max_iters = " << c.opt.max_iters << "\n";
    os << "tol_cost = " << format_double(c.opt.tol_cost) << "\n";
    os << "tol_g = " << format_double(c.opt.tol_g) << "\n";
    os << "resample = " << (c.resample ? "true" : "false") << "\n";
    os << "threads = " << c.threads << "\n";
    os << "out_dir = " << c.out_dir << "\n";
    return os.str();
}

RunConfig config_from_string(const std::string& text) {
    RunConfig c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));
        try {
            if (key == "example") c.example_id = std::stoi(val);
            else if (key == "grid_n") c.grid_n = std::stoi(val);
            else if (key == "eps") c.eps = parse_double(val);
            else if (key == "rho") c.rho = parse_double(val);
            else if (key == "n_samples") c.n_samples = std::stoi(val);
            else if (key == "seed") c.seed = std::stoull(val);
            else if (key == "direction") c.direction = direction_from_string(val);
            else if (key == "objective") c.objective = objective_from_string(val);
            else if (key == "subdomain") c.subdomain = subdomain_from_string(val);
            else if (key == "constraint") c.constraint = subdomain_from_string(val);
            else if (key == "f") c.f_tag = val;
            else if (key == "ud") c.ud_tag = val;
            else if (key == "g0") c.g0_tag = val;
            else if (key == "alpha_min") c.opt.alpha_min = parse_double(val);
            else if (key == "alpha_max") c.opt.alpha_max = parse_double(val);
            else if (key == "armijo_c") c.opt.armijo_c = parse_double(val);
            else if (key == "momentum_beta") c.opt.momentum_beta = parse_double(val);
            else if (key == "max_iters") c.opt.max_iters = std::stoi(val);
            else if (key == "tol_cost") c.opt.tol_cost = parse_double(val);
            else if (key == "tol_g") c.opt.tol_g = parse_double(val);
            else if (key == "resample") c.resample = (val == "true" || val == "1");
            else if (key == "threads") c.threads = std::stoi(val);
            else if (key == "out_dir") c.out_dir = val;
            else throw std::invalid_argument("unknown config key: " + key);
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": bad value for " + key);
        }
        if ((key == "f" || key == "ud" || key == "g0") && !is_known_function_tag(val))
            throw std::invalid_argument("unknown function tag: " + val);
    }
    return c;
}

void write_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << config_to_string(config);
    if (!out) throw std::runtime_error("write failed: " + path);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_string(buf.str());
}

}  // namespace shapeopt
