#include "xpmodels/riemann.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xpmodels/errors.hpp"

namespace xp::riemann {

using numerics::pi;

double smooth_zero_count(double t) {
    if (!(t > 0)) throw DomainError("smooth zero count needs t > 0");
    const double u = t / (2 * pi);
    return u * (std::log(u) - 1) + 7.0 / 8.0;
}

std::size_t ZerosTable::count_below(double t) const {
    return static_cast<std::size_t>(std::upper_bound(ordinates.begin(), ordinates.end(), t) - ordinates.begin());
}

std::optional<double> ZerosTable::nearest_distance(double t) const {
    if (ordinates.empty()) return std::nullopt;
    auto it = std::lower_bound(ordinates.begin(), ordinates.end(), t);
    double d = numerics::inf;
    if (it != ordinates.end()) d = *it - t;
    if (it != ordinates.begin()) d = std::min(d, t - *std::prev(it));
    return d;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ZerosTable parse_zeros(const std::string& text, const std::string& source) {
    ZerosTable table;
    table.source_path = source;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        double t = 0;
        const char* first = line.data();
        const char* last = first + line.size();
        if (*first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, t);
        if (ec != std::errc() || ptr != last)
            throw IngestionError(source + ":" + std::to_string(line_no) + ": not a number: '" + line + "'", line_no);
        if (!std::isfinite(t) || !(t > 0))
            throw IngestionError(source + ":" + std::to_string(line_no) + ": ordinate must be positive", line_no);
        if (!table.ordinates.empty() && !(t > table.ordinates.back()))
            throw IngestionError(source + ":" + std::to_string(line_no) + ": ordinates must be strictly ascending",
                                 line_no);
        table.ordinates.push_back(t);
    }
    return table;
}

ZerosTable load_zeros(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IngestionError("cannot open zeros file '" + path + "'", 0);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_zeros(buf.str(), path);
}

ComparisonReport compare_spectrum(const quantum::SpectrumResult& spec, const std::optional<ZerosTable>& zeros,
                                  const Identification& ident) {
    if (spec.eigenvalues.empty()) throw UsageError("comparison needs a nonempty spectrum");
    if (!(ident.alpha > 0)) throw UsageError("alpha must be positive");
    ComparisonReport rep;
    rep.alpha = ident.alpha;
    rep.hbar = ident.hbar.value_or(spec.hbar);
    if (!(rep.hbar > 0)) throw UsageError("hbar must be positive");
    rep.z0 = ident.z0.value_or(2 * pi * rep.hbar);
    rep.has_zeros = zeros.has_value();

    for (const auto& ev : spec.eigenvalues) {
        if (!(ev.E > 0)) continue;
        ComparisonRow r;
        r.n = ev.index;
        r.E = ev.E;
        r.t = ev.E / (rep.hbar * rep.alpha);
        r.smooth = smooth_zero_count(r.t);
        r.offset = r.smooth - static_cast<double>(r.n);
        if (zeros) {
            r.nearest_zero = zeros->nearest_distance(r.t);
            r.fluctuation = static_cast<double>(zeros->count_below(r.t)) - r.smooth;
        }
        rep.rows.push_back(r);
    }
    std::sort(rep.rows.begin(), rep.rows.end(), [](const auto& a, const auto& b) { return a.E < b.E; });
    if (!rep.rows.empty()) {
        double s = 0;
        rep.max_offset = -numerics::inf;
        rep.min_offset = numerics::inf;
        for (const auto& r : rep.rows) {
            s += r.offset;
            rep.max_offset = std::max(rep.max_offset, r.offset);
            rep.min_offset = std::min(rep.min_offset, r.offset);
        }
        rep.mean_offset = s / static_cast<double>(rep.rows.size());
    }
    return rep;
}

}  // namespace xp::riemann
