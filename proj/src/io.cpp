#include "shapeopt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace shapeopt {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e)
        throw std::invalid_argument("bad floating-point literal: '" + s + "'");
    return v;
}

std::vector<ContourPolyline> extract_zero_contour(const Mesh& mesh, const NodalVector& g) {
    if (static_cast<int>(g.size()) != mesh.n_vertices())
        throw std::invalid_argument("extract_zero_contour: field length mismatch");
    const long long nv = mesh.n_vertices();
    // tiny shift classifies exact zeros as inside without moving any crossing
    // by a representable amount
    auto gp = [&](int v) { return g[v] + 1e-30; };

    std::unordered_map<long long, Vec2> crossing;  // canonical edge key -> point
    auto cross_key = [&](int a, int b) {
        const int lo = std::min(a, b), hi = std::max(a, b);
        const long long key = static_cast<long long>(lo) * nv + hi;
        if (!crossing.count(key)) {
            const double glo = gp(lo), ghi = gp(hi);
            const double t = glo / (glo - ghi);
            const Vec2 p0 = mesh.vertices[lo], p1 = mesh.vertices[hi];
            crossing.emplace(key, Vec2{p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)});
        }
        return key;
    };

    struct Seg {
        long long a, b;
    };
    std::vector<Seg> segs;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const bool s0 = gp(tri[0]) >= 0.0, s1 = gp(tri[1]) >= 0.0, s2 = gp(tri[2]) >= 0.0;
        if (s0 == s1 && s1 == s2) continue;
        long long keys[2];
        int nk = 0;
        const int ea[3] = {0, 1, 2}, eb[3] = {1, 2, 0};
        const bool sv[3] = {s0, s1, s2};
        for (int e = 0; e < 3; ++e)
            if (sv[ea[e]] != sv[eb[e]]) keys[nk++] = cross_key(tri[ea[e]], tri[eb[e]]);
        segs.push_back({keys[0], keys[1]});
    }

    std::unordered_map<long long, std::vector<int>> incident;
    for (size_t i = 0; i < segs.size(); ++i) {
        incident[segs[i].a].push_back(static_cast<int>(i));
        incident[segs[i].b].push_back(static_cast<int>(i));
    }
    auto next_seg = [&](long long key, const std::vector<char>& used) {
        for (int si : incident[key])
            if (!used[si]) return si;
        return -1;
    };

    std::vector<char> used(segs.size(), 0);
    std::vector<ContourPolyline> out;
    for (size_t s0i = 0; s0i < segs.size(); ++s0i) {
        if (used[s0i]) continue;
        used[s0i] = 1;
        std::deque<long long> keys{segs[s0i].a, segs[s0i].b};
        // forward from the b end, closing the loop if we come back around
        long long k = segs[s0i].b;
        while (true) {
            const int nx = next_seg(k, used);
            if (nx < 0) break;
            used[nx] = 1;
            k = (segs[nx].a == k) ? segs[nx].b : segs[nx].a;
            keys.push_back(k);
            if (k == keys.front()) break;
        }
        const bool closed = keys.size() > 2 && keys.front() == keys.back();
        if (!closed) {
            long long ka = segs[s0i].a;
            while (true) {
                const int nx = next_seg(ka, used);
                if (nx < 0) break;
                used[nx] = 1;
                ka = (segs[nx].a == ka) ? segs[nx].b : segs[nx].a;
                keys.push_front(ka);
            }
        }
        ContourPolyline pl;
        pl.points.reserve(keys.size());
        for (long long key : keys) pl.points.push_back(crossing[key]);
        out.push_back(std::move(pl));
    }
    return out;
}

void write_history(const RunHistory& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "iter,cost,step,dcost,dg,seconds\n";
    for (const auto& r : history.records)
        out << r.iter << ',' << format_double(r.cost) << ',' << format_double(r.step) << ','
            << format_double(r.dcost) << ',' << format_double(r.dg) << ','
            << format_double(r.seconds) << '\n';
    out << "# termination=" << history.termination << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

RunHistory parse_history(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open history: " + path);
    RunHistory h;
    std::string line;
    if (!std::getline(in, line) || line != "iter,cost,step,dcost,dg,seconds")
        throw std::runtime_error("bad history header in " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string tag = "# termination=";
            if (line.rfind(tag, 0) == 0) h.termination = line.substr(tag.size());
            continue;
        }
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cells.push_back(cur);
        if (cells.size() != 6) throw std::runtime_error("bad history row in " + path);
        IterationRecord r;
        r.iter = std::stoi(cells[0]);
        r.cost = parse_double(cells[1]);
        r.step = parse_double(cells[2]);
        r.dcost = parse_double(cells[3]);
        r.dg = parse_double(cells[4]);
        r.seconds = parse_double(cells[5]);
        h.records.push_back(r);
    }
    return h;
}

std::string snapshot_name(int iter) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "shape_%04d.csv", iter);
    return buf;
}

std::string contour_name(int iter) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "contour_%04d.txt", iter);
    return buf;
}

void write_field_csv(const Mesh& mesh, const NodalVector& g, const std::string& path) {
    if (static_cast<int>(g.size()) != mesh.n_vertices())
        throw std::invalid_argument("write_field_csv: field length mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "x,y,g\n";
    for (int v = 0; v < mesh.n_vertices(); ++v)
        out << format_double(mesh.vertices[v].x) << ',' << format_double(mesh.vertices[v].y)
            << ',' << format_double(g[v]) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_contour_file(const std::vector<ContourPolyline>& polylines, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& pl : polylines) {
        out << "polyline " << pl.points.size() << '\n';
        for (const auto& p : pl.points)
            out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_field_snapshot(const Mesh& mesh, const NodalVector& g, int iter,
                          const std::string& dir) {
    write_field_csv(mesh, g, dir + "/" + snapshot_name(iter));
    write_contour_file(extract_zero_contour(mesh, g), dir + "/" + contour_name(iter));
}

NodalVector read_field_csv(const std::string& path, std::vector<Vec2>* coords) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field csv: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "x,y,g")
        throw std::runtime_error("bad field header in " + path);
    NodalVector g;
    if (coords) coords->clear();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const size_t c1 = line.find(',');
        const size_t c2 = (c1 == std::string::npos) ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw std::runtime_error("bad field row in " + path);
        const double x = parse_double(line.substr(0, c1));
        const double y = parse_double(line.substr(c1 + 1, c2 - c1 - 1));
        g.push_back(parse_double(line.substr(c2 + 1)));
        if (coords) coords->push_back({x, y});
    }
    return g;
}

}  // namespace shapeopt
