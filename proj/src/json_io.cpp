#include "valiron/json_io.hpp"

#include <cctype>

namespace valiron {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw domain_error(msg, where);
}

std::string str_field(const ojson& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail(where, std::string("missing field \"") + key + "\"");
    const ojson& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    fail(where + "." + key, "expected a string or number");
}

unsigned long nat_field(const ojson& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail(where, std::string("missing field \"") + key + "\"");
    const ojson& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<unsigned long>();
    if (v.is_string()) {
        try {
            return std::stoul(v.get<std::string>());
        } catch (const std::exception&) {
            fail(where + "." + key, "expected a natural number");
        }
    }
    fail(where + "." + key, "expected a natural number");
}

MultiIndex index_field(const ojson& v, unsigned long n, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an index array");
    MultiIndex a(n);
    if (v.size() != n) fail(where, "index arity does not match n");
    for (size_t i = 0; i < n; ++i) {
        if (!v[i].is_number_unsigned()) fail(where, "index entries must be naturals");
        a.e[i] = v[i].get<uint32_t>();
    }
    return a;
}

// "re" or ["re","im"] -> pair of value strings
std::pair<std::string, std::string> value_field(const ojson& v, const std::string& where) {
    if (v.is_string() || v.is_number()) {
        return {v.is_string() ? v.get<std::string>() : v.dump(), "0"};
    }
    if (v.is_array() && v.size() == 2) {
        auto part = [&](const ojson& p) -> std::string {
            if (p.is_string()) return p.get<std::string>();
            if (p.is_number()) return p.dump();
            fail(where, "complex parts must be strings or numbers");
        };
        return {part(v[0]), part(v[1])};
    }
    fail(where, "expected a value string or [re, im] pair");
}

}  // namespace

ojson parse_json_text(const std::string& text, const std::string& where) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(where, std::string("malformed JSON: ") + e.what());
    }
}

Rat rat_from_string(const std::string& s, const std::string& where) {
    if (s.empty()) fail(where, "empty number");
    // plain integer or p/q go straight to the exact parser
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find('E') == std::string::npos) {
        try {
            return Rat::parse(s);
        } catch (const std::exception& e) {
            fail(where, std::string("bad rational \"") + s + "\": " + e.what());
        }
    }
    // decimal, possibly with exponent: digits scaled by a power of ten
    size_t ep = s.find_first_of("eE");
    std::string mant = s.substr(0, ep);
    long exp10 = 0;
    if (ep != std::string::npos) {
        try {
            exp10 = std::stol(s.substr(ep + 1));
        } catch (const std::exception&) {
            fail(where, std::string("bad exponent in \"") + s + "\"");
        }
    }
    size_t dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
        digits = mant.substr(0, dot) + mant.substr(dot + 1);
        exp10 -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty() || digits == "-" || digits == "+") fail(where, "bad decimal \"" + s + "\"");
    for (size_t i = (digits[0] == '-' || digits[0] == '+') ? 1 : 0; i < digits.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(digits[i])))
            fail(where, "bad decimal \"" + s + "\"");
    Rat r = Rat::parse(digits);
    Rat ten(10);
    if (exp10 >= 0) return r * Rat::pow(ten, static_cast<unsigned long>(exp10));
    return r / Rat::pow(ten, static_cast<unsigned long>(-exp10));
}

BigFloat bf_from_json(const ojson& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return BigFloat::parse(j.get<std::string>());
        } catch (const std::exception& e) {
            fail(where, std::string("bad number: ") + e.what());
        }
    }
    if (j.is_number()) return BigFloat::parse(j.dump());
    fail(where, "expected a number or decimal string");
}

ProximateOrder order_from_json(const ojson& j, const std::string& where) {
    if (!j.is_object()) fail(where, "order must be a JSON object");
    std::string fam = str_field(j, "family", where);
    Family f;
    try {
        f = family_from_name(fam);
    } catch (const std::exception& e) {
        fail(where + ".family", e.what());
    }
    BigFloat rho = bf_from_json(j.contains("rho") ? j.at("rho") : ojson(), where + ".rho");
    BigFloat k(0L);
    if (j.contains("k")) k = bf_from_json(j.at("k"), where + ".k");
    ProximateOrder o;
    switch (f) {
        case Family::Constant:
            o = ProximateOrder::constant(rho);
            break;
        case Family::LogLog:
            o = ProximateOrder::loglog(rho, k);
            break;
        case Family::LogLogLog:
            o = ProximateOrder::logloglog(rho, k);
            break;
    }
    if (j.contains("r_cut")) {
        o.r_cut = bf_from_json(j.at("r_cut"), where + ".r_cut");
        o.validate();
    }
    if (j.contains("log_scale")) {
        o.log_scale = bf_from_json(j.at("log_scale"), where + ".log_scale");
        o.validate();
    }
    return o;
}

ojson order_to_json(const ProximateOrder& o) {
    ojson j;
    j["family"] = family_name(o.family);
    j["rho"] = o.rho.str();
    j["k"] = o.k.str();
    j["r_cut"] = o.r_cut.str();
    if (!o.log_scale.is_zero()) j["log_scale"] = o.log_scale.str();
    return j;
}

namespace {

template <class T, class FromParts>
Series<T> series_from_json_impl(const ojson& j, const std::string& where, FromParts from_parts) {
    if (!j.is_object()) fail(where, "series must be a JSON object");
    unsigned long n = nat_field(j, "n", where);
    if (n == 0) fail(where + ".n", "n must be >= 1");
    unsigned long q_max = nat_field(j, "q_max", where);
    Series<T> f(n, q_max);
    if (!j.contains("coefficients")) fail(where, "missing field \"coefficients\"");
    const ojson& cs = j.at("coefficients");
    if (!cs.is_array()) fail(where + ".coefficients", "expected an array");
    size_t i = 0;
    for (const ojson& c : cs) {
        std::string cw = where + ".coefficients[" + std::to_string(i++) + "]";
        if (!c.is_object() || !c.contains("alpha") || !c.contains("value"))
            fail(cw, "expected {\"alpha\": [...], \"value\": ...}");
        MultiIndex a = index_field(c.at("alpha"), n, cw + ".alpha");
        auto [re, im] = value_field(c.at("value"), cw + ".value");
        try {
            f.set(a, from_parts(re, im, cw));
        } catch (const domain_error& e) {
            if (e.where.empty()) fail(cw, e.what());
            throw;
        }
    }
    return f;
}

}  // namespace

ExactSeries exact_series_from_json(const ojson& j, const std::string& where) {
    return series_from_json_impl<GaussRat>(
        j, where, [](const std::string& re, const std::string& im, const std::string& cw) {
            return GaussRat(rat_from_string(re, cw), rat_from_string(im, cw));
        });
}

NumSeries num_series_from_json(const ojson& j, const std::string& where) {
    return series_from_json_impl<BigComplex>(
        j, where, [](const std::string& re, const std::string& im, const std::string& cw) {
            try {
                return BigComplex(BigFloat::parse(re), BigFloat::parse(im));
            } catch (const std::exception& e) {
                fail(cw, std::string("bad number: ") + e.what());
            }
        });
}

namespace {

ojson value_json(const GaussRat& c) {
    if (c.im.is_zero()) return ojson(c.re.str());
    return ojson::array({c.re.str(), c.im.str()});
}

ojson value_json(const BigComplex& c) {
    if (c.im.is_zero()) return ojson(c.re.str());
    return ojson::array({c.re.str(), c.im.str()});
}

template <class T>
ojson series_to_json_impl(const Series<T>& f) {
    ojson j;
    j["n"] = f.n;
    j["q_max"] = f.q_max;
    ojson cs = ojson::array();
    for (const auto& [a, c] : f.coeffs) {
        ojson e;
        e["alpha"] = a.e;
        e["value"] = value_json(c);
        cs.push_back(std::move(e));
    }
    j["coefficients"] = std::move(cs);
    return j;
}

}  // namespace

ojson series_to_json(const ExactSeries& f) { return series_to_json_impl(f); }
ojson series_to_json(const NumSeries& f) { return series_to_json_impl(f); }

namespace {

template <class T, class SeriesParse>
Symbol<T> symbol_from_json_impl(const ojson& j, const std::string& where, SeriesParse parse) {
    if (!j.is_object()) fail(where, "symbol must be a JSON object");
    unsigned long n = nat_field(j, "n", where);
    if (n == 0) fail(where + ".n", "n must be >= 1");
    Symbol<T> s(n, nat_field(j, "a_max", where));
    if (!j.contains("entries")) fail(where, "missing field \"entries\"");
    const ojson& es = j.at("entries");
    if (!es.is_array()) fail(where + ".entries", "expected an array");
    size_t i = 0;
    for (const ojson& e : es) {
        std::string ew = where + ".entries[" + std::to_string(i++) + "]";
        if (!e.is_object() || !e.contains("alpha") || !e.contains("series"))
            fail(ew, "expected {\"alpha\": [...], \"series\": {...}}");
        MultiIndex a = index_field(e.at("alpha"), n, ew + ".alpha");
        Series<T> coeff = parse(e.at("series"), ew + ".series");
        try {
            s.set(a, std::move(coeff));
        } catch (const domain_error& de) {
            if (de.where.empty()) fail(ew, de.what());
            throw;
        }
    }
    return s;
}

}  // namespace

ExactSymbol exact_symbol_from_json(const ojson& j, const std::string& where) {
    return symbol_from_json_impl<GaussRat>(j, where, exact_series_from_json);
}

NumSymbol num_symbol_from_json(const ojson& j, const std::string& where) {
    return symbol_from_json_impl<BigComplex>(j, where, num_series_from_json);
}

ojson symbol_to_json(const ExactSymbol& s) {
    ojson j;
    j["n"] = s.n;
    j["a_max"] = s.a_max;
    ojson es = ojson::array();
    for (const auto& [a, aa] : s.table) {
        ojson e;
        e["alpha"] = a.e;
        e["series"] = series_to_json(aa);
        es.push_back(std::move(e));
    }
    j["entries"] = std::move(es);
    return j;
}

ExactHomImages hom_from_json(const ojson& j, const std::string& where) {
    if (!j.is_object()) fail(where, "homomorphism table must be a JSON object");
    ExactHomImages h;
    h.n = nat_field(j, "n", where);
    if (h.n == 0) fail(where + ".n", "n must be >= 1");
    h.b_max = nat_field(j, "b_max", where);
    if (!j.contains("entries")) fail(where, "missing field \"entries\"");
    const ojson& es = j.at("entries");
    if (!es.is_array()) fail(where + ".entries", "expected an array");
    size_t i = 0;
    for (const ojson& e : es) {
        std::string ew = where + ".entries[" + std::to_string(i++) + "]";
        if (!e.is_object() || !e.contains("beta") || !e.contains("series"))
            fail(ew, "expected {\"beta\": [...], \"series\": {...}}");
        MultiIndex b = index_field(e.at("beta"), h.n, ew + ".beta");
        if (b.degree() > h.b_max) fail(ew + ".beta", "|beta| exceeds b_max");
        ExactSeries img = exact_series_from_json(e.at("series"), ew + ".series");
        if (img.n != h.n) fail(ew + ".series", "series arity does not match n");
        h.images[b] = std::move(img);
    }
    return h;
}

ojson hom_to_json(const ExactHomImages& h) {
    ojson j;
    j["n"] = h.n;
    j["b_max"] = h.b_max;
    ojson es = ojson::array();
    for (const auto& [b, img] : h.images) {
        ojson e;
        e["beta"] = b.e;
        e["series"] = series_to_json(img);
        es.push_back(std::move(e));
    }
    j["entries"] = std::move(es);
    return j;
}

ojson growth_scale_to_json(const GrowthScale& g) {
    ojson j;
    j["rho"] = g.order.base.rho.str();
    j["q_max"] = g.q_max;
    ojson v = ojson::array();
    for (const BigFloat& x : g.ln_G) v.push_back(x.str());
    j["ln_G"] = std::move(v);
    return j;
}

namespace {

ojson fitted_json(const std::vector<std::pair<std::string, BigFloat>>& fitted) {
    ojson f;
    for (const auto& [k, v] : fitted) f[k] = v.str();
    return f;
}

}  // namespace

ojson lemma_report_to_json(const LemmaReport& r) {
    ojson j;
    j["lemma_id"] = r.lemma_id;
    j["passed"] = r.passed;
    j["max_violation"] = r.max_violation.str();
    j["fitted"] = fitted_json(r.fitted);
    j["grid"] = r.grid;
    return j;
}

ojson type_estimate_to_json(const TypeEstimate& t) {
    ojson j;
    j["sigma_hat"] = t.sigma_hat.str();
    j["q_lo"] = t.q_lo;
    j["q_hi"] = t.q_hi;
    j["trend_slope"] = t.trend_slope.str();
    j["confidence_note"] = t.confidence_note;
    return j;
}

ojson membership_to_json(const MembershipVerdict& v) {
    ojson j;
    j["verdict"] = verdict_name(v.verdict);
    j["margin"] = v.margin.str();
    j["fitted"] = fitted_json(v.fitted);
    j["diagnostics"] = v.diagnostics;
    return j;
}

ojson symbol_verdict_to_json(const SymbolClassVerdict& v) {
    ojson j;
    j["mode"] = symbol_mode_name(v.mode);
    j["verdict"] = verdict_name(v.verdict);
    j["extrapolated"] = v.extrapolated;
    j["diagnostics"] = v.diagnostics;
    ojson ps = ojson::array();
    for (const ProbeResult& p : v.probes) {
        ojson e;
        e["probe"] = p.probe.str();
        e["ok"] = p.ok;
        e["via_rate_extrapolation"] = p.via_rate_extrapolation;
        e["definitive_fail"] = p.definitive_fail;
        e["partner"] = p.partner.str();
        e["C"] = p.C.str();
        e["y_slope_span"] = p.y_slope_span.str();
        e["rate_slope_span"] = p.rate_slope_span.str();
        e["ln_witness_max"] = p.ln_witness_max.str();
        e["witness_cross_q"] = p.witness_cross_q;
        e["note"] = p.note;
        ps.push_back(std::move(e));
    }
    j["probes"] = std::move(ps);
    return j;
}

ojson corpus_manifest_json(const std::vector<oracle::CorpusRecord>& records,
                           uint64_t master_seed) {
    ojson j;
    j["master_seed"] = std::to_string(master_seed);
    j["count"] = records.size();
    ojson items = ojson::array();
    for (const auto& r : records) {
        ojson e;
        e["seed"] = r.seed;
        e["n"] = r.n;
        e["symbol_entries"] = r.symbol_entries;
        e["digest_symbol"] = r.digest_symbol;
        e["digest_hom"] = r.digest_hom;
        e["digest_apply"] = r.digest_apply;
        items.push_back(std::move(e));
    }
    j["items"] = std::move(items);
    return j;
}

std::vector<oracle::CorpusRecord> corpus_manifest_from_json(const ojson& j,
                                                            const std::string& where) {
    if (!j.is_object() || !j.contains("items") || !j.at("items").is_array())
        fail(where, "manifest must be an object with an \"items\" array");
    std::vector<oracle::CorpusRecord> out;
    size_t i = 0;
    for (const ojson& e : j.at("items")) {
        std::string ew = where + ".items[" + std::to_string(i++) + "]";
        oracle::CorpusRecord r;
        r.seed = str_field(e, "seed", ew);
        r.n = nat_field(e, "n", ew);
        r.symbol_entries = nat_field(e, "symbol_entries", ew);
        r.digest_symbol = str_field(e, "digest_symbol", ew);
        r.digest_hom = str_field(e, "digest_hom", ew);
        r.digest_apply = str_field(e, "digest_apply", ew);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace valiron
