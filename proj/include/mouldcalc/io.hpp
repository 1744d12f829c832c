#pragma once

// JSON and CSV interchange: field files, coefficient tables and the on-disk
// mould cache. Every rational travels as exact decimal strings.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include <mouldcalc/moulds.hpp>
#include <mouldcalc/saddlenode.hpp>
#include <mouldcalc/scalar.hpp>
#include <mouldcalc/series.hpp>
#include <mouldcalc/words.hpp>

namespace mouldcalc
{

using json = nlohmann::ordered_json;

/// Malformed or unreadable input (field files, caches, option values).
class input_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// [re_num, re_den, im_num, im_den], each a decimal string so that no
/// reader rounds big integers.
inline json scalar_to_json(const Scalar &c)
{
    return json::array({c.re().get_num().get_str(), c.re().get_den().get_str(), c.im().get_num().get_str(),
                        c.im().get_den().get_str()});
}

inline Integer integer_from_json(const json &j)
{
    if (j.is_number_integer()) {
        return Integer(j.get<long>());
    }
    if (j.is_string()) {
        Integer z;
        if (z.set_str(j.get<std::string>(), 10) == 0) {
            return z;
        }
    }
    throw input_error("expected an integer or a decimal string, got " + j.dump());
}

inline Rational rational_from_json(const json &num, const json &den)
{
    Rational q(integer_from_json(num), integer_from_json(den));
    if (sgn(q.get_den()) == 0) {
        throw input_error("zero denominator");
    }
    q.canonicalize();
    return q;
}

/// Also accepts a bare "p/q" string or an integer for real coefficients.
inline Scalar scalar_from_json(const json &j)
{
    if (j.is_array() && j.size() == 4) {
        return Scalar(rational_from_json(j[0], j[1]), rational_from_json(j[2], j[3]));
    }
    if (j.is_number_integer()) {
        return Scalar(Rational(j.get<long>()));
    }
    if (j.is_string()) {
        try {
            return Scalar(parse_rational(j.get<std::string>()));
        } catch (const std::exception &e) {
            throw input_error(std::string("bad rational: ") + e.what());
        }
    }
    throw input_error("expected [re_num, re_den, im_num, im_den], got " + j.dump());
}

inline json series_to_json(const TruncatedSeries &s)
{
    json a = json::array();
    for (const auto &c : s.coeffs()) {
        a.push_back(scalar_to_json(c));
    }
    return {{"order", s.order()}, {"coeffs", a}};
}

inline TruncatedSeries series_from_json(const json &j)
{
    if (!j.is_object() || !j.contains("order") || !j.contains("coeffs") || !j["coeffs"].is_array()) {
        throw input_error("series must be {\"order\": K, \"coeffs\": [...]}");
    }
    const auto &a = j["coeffs"];
    if (!j["order"].is_number_integer() || j["order"].get<long>() + 1 != static_cast<long>(a.size())) {
        throw input_error("series order does not match its coefficient count");
    }
    std::vector<Scalar> c;
    for (const auto &e : a) {
        c.push_back(scalar_from_json(e));
    }
    return TruncatedSeries(std::move(c));
}

inline json word_to_json(const Word &w) { return json(std::vector<Letter>(w.begin(), w.end())); }

inline Word word_from_json(const json &j)
{
    if (!j.is_array()) {
        throw input_error("word must be an array of letters");
    }
    std::vector<Letter> l;
    for (const auto &e : j) {
        if (!e.is_number_integer()) {
            throw input_error("letters must be integers");
        }
        l.push_back(e.get<Letter>());
    }
    try {
        return Word(std::move(l));
    } catch (const std::invalid_argument &e) {
        throw input_error(e.what());
    }
}

inline json read_json_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) {
        throw input_error("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw input_error(path.string() + ": " + e.what());
    }
}

inline void write_text_file(const std::filesystem::path &path, const std::string &text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) {
        throw input_error("cannot write " + path.string());
    }
}

/// Field file:
///   {"x_order": K, "y_order": N,
///    "monomials": [{"m": 1, "n": 0, "re": [1, 1], "im": [0, 1]}, ...]}
/// "im" may be omitted; the orders default to the largest exponents present.
inline BivariateSeries field_polynomial_from_json(const json &j)
{
    if (!j.is_object() || !j.contains("monomials") || !j["monomials"].is_array()) {
        throw input_error("field file needs a \"monomials\" array");
    }
    auto pair = [](const json &t, const char *key) {
        const json &p = t[key];
        if (!p.is_array() || p.size() != 2) {
            throw input_error(std::string("\"") + key + "\" must be [num, den] in " + t.dump());
        }
        return rational_from_json(p[0], p[1]);
    };
    std::vector<std::tuple<int, int, Scalar>> terms;
    int mx = 0, my = 1;
    for (const auto &t : j["monomials"]) {
        if (!t.is_object() || !t.contains("m") || !t.contains("n") || !t.contains("re")) {
            throw input_error("monomial needs \"m\", \"n\" and \"re\": " + t.dump());
        }
        if (!t["m"].is_number_integer() || !t["n"].is_number_integer()) {
            throw input_error("monomial exponents must be integers: " + t.dump());
        }
        const int m = t["m"].get<int>(), n = t["n"].get<int>();
        if (m < 0 || n < 0) {
            throw input_error("negative exponent in " + t.dump());
        }
        terms.emplace_back(m, n, Scalar(pair(t, "re"), t.contains("im") ? pair(t, "im") : Rational(0)));
        mx = std::max(mx, m);
        my = std::max(my, n);
    }
    auto order = [&](const char *key, int fallback) {
        if (!j.contains(key)) {
            return fallback;
        }
        if (!j[key].is_number_integer() || j[key].get<int>() < fallback) {
            throw input_error(std::string("\"") + key + "\" must be an integer covering every monomial");
        }
        return j[key].get<int>();
    };
    try {
        return bivariate_from_terms(terms, order("x_order", mx), order("y_order", my));
    } catch (const std::out_of_range &e) {
        throw input_error(e.what());
    }
}

inline json field_polynomial_to_json(const BivariateSeries &a)
{
    json terms = json::array();
    for (const auto &[m, n, c] : a.nonzero_terms()) {
        json t = {{"m", m}, {"n", n}, {"re", json::array({c.re().get_num().get_str(), c.re().get_den().get_str()})}};
        if (!c.is_real()) {
            t["im"] = json::array({c.im().get_num().get_str(), c.im().get_den().get_str()});
        }
        terms.push_back(t);
    }
    return {{"x_order", a.x_order()}, {"y_order", a.y_order()}, {"monomials", terms}};
}

inline SaddleNodeField load_field(const std::filesystem::path &path, validation_mode mode = validation_mode::strict)
{
    return extract_letters(field_polynomial_from_json(read_json_file(path)), mode);
}

/// 64-bit FNV-1a of the canonical monomial list; identifies a field in caches.
inline std::string field_fingerprint(const SaddleNodeField &field)
{
    std::string canon;
    for (const auto &[m, n, c] : field.polynomial().nonzero_terms()) {
        canon += std::to_string(m) + ',' + std::to_string(n) + ',' + c.re().get_str() + ',' + c.im().get_str() + ';';
    }
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

enum class output_format { json, csv };

/// One coefficient table: a phi_n, psi_n or Borel component.
struct ComponentTable {
    std::string kind; // "phi", "psi" or "phi_hat"
    int n = 0;
    std::string variable; // "x" or "zeta"
    TruncatedSeries coeffs;
    std::string word_count;
};

inline json count_to_json(const std::string &decimal)
{
    Integer z(decimal);
    if (z.fits_slong_p()) {
        return z.get_si();
    }
    return decimal;
}

inline std::string render(const ComponentTable &t, output_format fmt)
{
    if (fmt == output_format::csv) {
        std::string out = "power,coefficient\n";
        for (int k = 0; k <= t.coeffs.order(); ++k) {
            out += std::to_string(k) + ',' + t.coeffs[k].to_string() + '\n';
        }
        return out;
    }
    const json s = series_to_json(t.coeffs);
    json j = {{"kind", t.kind},
              {"n", t.n},
              {t.variable + "_order", t.coeffs.order()},
              {"coeffs", s["coeffs"]},
              {"word_count", count_to_json(t.word_count)}};
    return j.dump(2) + '\n';
}

inline std::string file_name(const ComponentTable &t, output_format fmt)
{
    return t.kind + '_' + std::to_string(t.n) + (fmt == output_format::csv ? ".csv" : ".json");
}

/// Cached values of the normalising mould V for one field.
struct MouldCache {
    static constexpr int version = 1;
    std::string fingerprint;
    int x_order = 0;
    std::vector<std::pair<Word, TruncatedSeries>> entries;
};

inline json cache_to_json(const MouldCache &c)
{
    json entries = json::array();
    for (const auto &[w, s] : c.entries) {
        entries.push_back({{"word", word_to_json(w)}, {"coeffs", series_to_json(s)["coeffs"]}});
    }
    return {{"version", MouldCache::version},
            {"field_hash", c.fingerprint},
            {"x_order", c.x_order},
            {"entries", entries}};
}

inline MouldCache cache_from_json(const json &j)
{
    try {
        if (!j.is_object() || j.at("version").get<int>() != MouldCache::version) {
            throw input_error("unsupported cache version");
        }
        MouldCache c;
        c.fingerprint = j.at("field_hash").get<std::string>();
        c.x_order = j.at("x_order").get<int>();
        for (const auto &e : j.at("entries")) {
            TruncatedSeries s = series_from_json({{"order", c.x_order}, {"coeffs", e.at("coeffs")}});
            c.entries.emplace_back(word_from_json(e.at("word")), std::move(s));
        }
        return c;
    } catch (const json::exception &e) {
        throw input_error(std::string("corrupted cache: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw input_error(std::string("corrupted cache: ") + e.what());
    }
}

inline MouldCache load_cache(const std::filesystem::path &path)
{
    try {
        return cache_from_json(read_json_file(path));
    } catch (const input_error &e) {
        throw input_error(path.string() + ": " + e.what());
    }
}

/// Write atomically: to a sibling temporary, then rename over the target.
inline void save_cache(const std::filesystem::path &path, const MouldCache &c)
{
    const std::filesystem::path tmp = path.string() + ".tmp";
    write_text_file(tmp, cache_to_json(c).dump() + '\n');
    std::filesystem::rename(tmp, path);
}

inline MouldCache snapshot_cache(const Mould &v, const SaddleNodeField &field)
{
    return {field_fingerprint(field), v.x_order(), v.memo_snapshot()};
}

/// Seed a solver mould from a cache for the same field, known at least as far.
/// Returns the number of entries used.
inline std::size_t preload_cache(const Mould &v, const SaddleNodeField &field, const MouldCache &c)
{
    if (c.fingerprint != field_fingerprint(field) || c.x_order < v.x_order()) {
        return 0;
    }
    for (const auto &[w, s] : c.entries) {
        v.preload(w, s);
    }
    return c.entries.size();
}

} // namespace mouldcalc
