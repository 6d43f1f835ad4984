#include "hcsmooth/instances.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "hcsmooth/errors.hpp"

namespace hcsmooth {

UbqpInstance::UbqpInstance(int n, std::span<const UbqpTriple> triples, std::string name)
    : n_(n), name_(std::move(name)) {
    if (n < 1) throw DimensionError("UBQP instance needs n >= 1");
    build(triples);
}

UbqpInstance UbqpInstance::from_dense(const std::vector<std::vector<std::int64_t>>& q,
                                      std::string name) {
    const int n = static_cast<int>(q.size());
    if (n < 1) throw DimensionError("UBQP instance needs n >= 1");
    std::vector<UbqpTriple> triples;
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(q[i].size()) != n) throw DimensionError("matrix is not square");
        for (int j = i; j < n; ++j) {
            if (q[i][j] != q[j][i]) throw DimensionError("matrix is not symmetric");
            if (q[i][j] != 0) triples.push_back({i, j, q[i][j]});
        }
    }
    return UbqpInstance(n, triples, std::move(name));
}

void UbqpInstance::build(std::span<const UbqpTriple> triples) {
    const auto n = static_cast<std::size_t>(n_);
    diag_.assign(n, 0);
    std::vector<std::size_t> degree(n, 0);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(triples.size() * 2);
    for (const auto& t : triples) {
        if (t.i < 0 || t.i >= n_ || t.j < 0 || t.j >= n_)
            throw BoundsError("coefficient index (" + std::to_string(t.i + 1) + "," +
                              std::to_string(t.j + 1) + ") outside [1," + std::to_string(n_) + "]");
        const auto lo = static_cast<std::uint64_t>(std::min(t.i, t.j));
        const auto hi = static_cast<std::uint64_t>(std::max(t.i, t.j));
        if (!seen.insert(lo * n + hi).second)
            throw DuplicateEntryError("duplicate coefficient (" + std::to_string(t.i + 1) + "," +
                                      std::to_string(t.j + 1) + ")");
        max_abs_ = std::max(max_abs_, t.value < 0 ? -t.value : t.value);
        if (t.i == t.j) {
            diag_[lo] = t.value;
        } else if (t.value != 0) {
            ++degree[lo];
            ++degree[hi];
        }
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    cols_.resize(offsets_[n]);
    vals_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& t : triples) {
        if (t.i == t.j || t.value == 0) continue;
        cols_[fill[t.i]] = t.j;
        vals_[fill[t.i]++] = t.value;
        cols_[fill[t.j]] = t.i;
        vals_[fill[t.j]++] = t.value;
    }
    // Sorted rows make coef() lookups and serialization deterministic.
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> idx(degree[i]);
        std::iota(idx.begin(), idx.end(), offsets_[i]);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return cols_[a] < cols_[b]; });
        std::vector<int> c;
        std::vector<std::int64_t> v;
        for (auto k : idx) {
            c.push_back(cols_[k]);
            v.push_back(vals_[k]);
        }
        std::copy(c.begin(), c.end(), cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]));
        std::copy(v.begin(), v.end(), vals_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]));
    }
    if (n_ <= kDenseLimit) {
        dense_.assign(n * n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            dense_[i * n + i] = static_cast<std::int32_t>(diag_[i]);
            for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
                dense_[i * n + static_cast<std::size_t>(cols_[k])] = static_cast<std::int32_t>(vals_[k]);
        }
    }
}

std::int64_t UbqpInstance::coef(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_) throw BoundsError("coefficient index out of range");
    if (!dense_.empty()) return dense_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
    if (i == j) return diag_[static_cast<std::size_t>(i)];
    auto cols = row_columns(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0;
    return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

std::size_t UbqpInstance::upper_nonzeros() const noexcept {
    std::size_t count = cols_.size() / 2;
    for (auto d : diag_)
        if (d != 0) ++count;
    return count;
}

int euc2d_distance(Point a, Point b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return static_cast<int>(std::sqrt(dx * dx + dy * dy) + 0.5);
}

TspInstance::TspInstance(std::vector<Point> coords, std::string name)
    : coords_(std::move(coords)), name_(std::move(name)) {
    if (coords_.size() < 3) throw DimensionError("TSP instance needs at least 3 cities");
    for (const auto& p : coords_)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DimensionError("non-finite coordinate");
    const std::size_t n = coords_.size();
    if (n <= static_cast<std::size_t>(kMatrixLimit)) {
        matrix_.assign(n * n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                matrix_[i * n + j] = matrix_[j * n + i] = euc2d_distance(coords_[i], coords_[j]);
    }
}

namespace {

// Whitespace tokenizer that remembers the line of the last token.
class TokenReader {
public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    bool next(std::string& token) {
        token.clear();
        int c;
        while ((c = in_.get()) != EOF) {
            if (c == '\n') {
                ++line_;
                continue;
            }
            if (!std::isspace(c)) break;
        }
        if (c == EOF) return false;
        token.push_back(static_cast<char>(c));
        while ((c = in_.peek()) != EOF && !std::isspace(c)) token.push_back(static_cast<char>(in_.get()));
        return true;
    }

    template <class T>
    T number(const char* what) {
        std::string token;
        if (!next(token)) throw ParseError(std::string("unexpected end of input, expected ") + what, line_);
        T value{};
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size())
            throw ParseError("malformed " + std::string(what) + " '" + token + "'", line_);
        return value;
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
};

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

void write_double(std::ostream& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
}

}  // namespace

std::vector<UbqpInstance> parse_orlib_ubqp(std::istream& in) {
    TokenReader reader(in);
    const auto count = reader.number<long long>("instance count");
    if (count < 0) throw ParseError("negative instance count", reader.line());
    std::vector<UbqpInstance> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long long k = 0; k < count; ++k) {
        const auto n = reader.number<long long>("variable count");
        const auto nnz = reader.number<long long>("nonzero count");
        if (n < 1 || n > (1LL << 30)) throw ParseError("invalid variable count", reader.line());
        if (nnz < 0) throw ParseError("invalid nonzero count", reader.line());
        std::vector<UbqpTriple> triples;
        triples.reserve(static_cast<std::size_t>(nnz));
        for (long long e = 0; e < nnz; ++e) {
            const auto i = reader.number<long long>("row index");
            const auto j = reader.number<long long>("column index");
            const auto v = reader.number<long long>("coefficient");
            if (i < 1 || i > n || j < 1 || j > n)
                throw BoundsError("line " + std::to_string(reader.line()) + ": index (" +
                                  std::to_string(i) + "," + std::to_string(j) + ") outside [1," +
                                  std::to_string(n) + "]");
            triples.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
        }
        out.emplace_back(static_cast<int>(n), triples);
    }
    return out;
}

std::vector<UbqpInstance> parse_orlib_ubqp(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_orlib_ubqp(in);
}

void write_orlib_ubqp(std::ostream& out, std::span<const UbqpInstance> instances) {
    out << instances.size() << '\n';
    for (const auto& inst : instances) {
        out << inst.size() << ' ' << inst.upper_nonzeros() << '\n';
        for (int i = 0; i < inst.size(); ++i) {
            if (inst.diag(i) != 0) out << i + 1 << ' ' << i + 1 << ' ' << inst.diag(i) << '\n';
            auto cols = inst.row_columns(i);
            auto vals = inst.row_values(i);
            for (std::size_t k = 0; k < cols.size(); ++k)
                if (cols[k] > i) out << i + 1 << ' ' << cols[k] + 1 << ' ' << vals[k] << '\n';
        }
    }
}

TspInstance parse_tsplib(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::string name;
    long long dimension = -1;
    std::string weight_type;
    bool have_coords = false;
    std::vector<Point> coords;

    while (std::getline(in, line)) {
        ++lineno;
        std::string text = trim(line);
        if (text.empty()) continue;
        if (text == "EOF") break;
        if (text.rfind("NODE_COORD_SECTION", 0) == 0) {
            if (dimension < 0) throw ParseError("NODE_COORD_SECTION before DIMENSION", lineno);
            if (weight_type.empty()) throw ParseError("missing EDGE_WEIGHT_TYPE", lineno);
            have_coords = true;
            coords.reserve(static_cast<std::size_t>(dimension));
            while (static_cast<long long>(coords.size()) < dimension && std::getline(in, line)) {
                ++lineno;
                std::string row = trim(line);
                if (row.empty()) continue;
                std::istringstream fields(row);
                long long id;
                double x, y;
                if (!(fields >> id >> x >> y)) throw ParseError("malformed coordinate line", lineno);
                coords.push_back({x, y});
            }
            if (static_cast<long long>(coords.size()) != dimension)
                throw ParseError("expected " + std::to_string(dimension) + " coordinates, found " +
                                     std::to_string(coords.size()),
                                 lineno);
            continue;
        }
        auto colon = text.find(':');
        if (colon == std::string::npos) throw ParseError("unrecognized line '" + text + "'", lineno);
        std::string key = trim(std::string_view(text).substr(0, colon));
        std::string value = trim(std::string_view(text).substr(colon + 1));
        if (key == "NAME") {
            name = value;
        } else if (key == "TYPE") {
            if (value != "TSP") throw UnsupportedFormatError("unsupported TSPLIB TYPE: " + value);
        } else if (key == "DIMENSION") {
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), dimension);
            if (ec != std::errc{} || ptr != value.data() + value.size() || dimension < 3)
                throw ParseError("invalid DIMENSION '" + value + "'", lineno);
        } else if (key == "EDGE_WEIGHT_TYPE") {
            if (value != "EUC_2D") throw UnsupportedFormatError("unsupported EDGE_WEIGHT_TYPE: " + value);
            weight_type = value;
        }
        // COMMENT and other header keys carry nothing we need.
    }
    if (dimension < 0) throw ParseError("missing DIMENSION", lineno);
    if (weight_type.empty()) throw ParseError("missing EDGE_WEIGHT_TYPE", lineno);
    if (!have_coords) throw ParseError("missing NODE_COORD_SECTION", lineno);
    return TspInstance(std::move(coords), name);
}

TspInstance parse_tsplib(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_tsplib(in);
}

void write_tsplib(std::ostream& out, const TspInstance& instance) {
    if (!instance.name().empty()) out << "NAME : " << instance.name() << '\n';
    out << "TYPE : TSP\n";
    out << "DIMENSION : " << instance.size() << '\n';
    out << "EDGE_WEIGHT_TYPE : EUC_2D\n";
    out << "NODE_COORD_SECTION\n";
    int id = 1;
    for (const auto& p : instance.coords()) {
        out << id++ << ' ';
        write_double(out, p.x);
        out << ' ';
        write_double(out, p.y);
        out << '\n';
    }
    out << "EOF\n";
}

std::int64_t evaluate_ubqp(const UbqpInstance& instance, const BitString& x) {
    if (static_cast<int>(x.size()) != instance.size())
        throw DimensionError("solution length " + std::to_string(x.size()) + " != n " +
                             std::to_string(instance.size()));
    std::int64_t total = 0;
    for (int i = 0; i < instance.size(); ++i) {
        if (!x[static_cast<std::size_t>(i)]) continue;
        std::int64_t row = instance.diag(i);
        auto cols = instance.row_columns(i);
        auto vals = instance.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (x[static_cast<std::size_t>(cols[k])]) row += vals[k];
        total += row;
    }
    return total;
}

bool is_valid_tour(const Tour& tour, int n) {
    if (static_cast<int>(tour.size()) != n) return false;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int c : tour) {
        if (c < 0 || c >= n || seen[static_cast<std::size_t>(c)]) return false;
        seen[static_cast<std::size_t>(c)] = 1;
    }
    return true;
}

std::int64_t evaluate_tour(const TspInstance& instance, const Tour& tour) {
    if (!is_valid_tour(tour, instance.size())) throw DimensionError("tour is not a permutation of the cities");
    std::int64_t total = instance.distance(tour.back(), tour.front());
    for (std::size_t k = 0; k + 1 < tour.size(); ++k) total += instance.distance(tour[k], tour[k + 1]);
    return total;
}

BitString random_bits(int n, Rng& rng) {
    BitString x(static_cast<std::size_t>(n));
    for (auto& b : x) b = static_cast<std::uint8_t>(rng() >> 63);
    return x;
}

Tour random_tour(int n, Rng& rng) {
    Tour t(static_cast<std::size_t>(n));
    std::iota(t.begin(), t.end(), 0);
    for (std::size_t i = t.size(); i > 1; --i) std::swap(t[i - 1], t[uniform_index(rng, i)]);
    return t;
}

UbqpInstance random_ubqp(int n, double density, int max_abs, Rng& rng, std::string name) {
    std::vector<UbqpTriple> triples;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            if (coin(rng) >= density) continue;
            auto v = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(2 * max_abs + 1))) - max_abs;
            if (v != 0) triples.push_back({i, j, v});
        }
    return UbqpInstance(n, triples, std::move(name));
}

TspInstance random_tsp(int n, double extent, Rng& rng, std::string name) {
    std::vector<Point> pts(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> coord(0.0, extent);
    for (auto& p : pts) {
        p.x = std::floor(coord(rng));
        p.y = std::floor(coord(rng));
    }
    return TspInstance(std::move(pts), std::move(name));
}

}  // namespace hcsmooth
