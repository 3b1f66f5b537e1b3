#ifndef VALIRON_JSON_IO_HPP
#define VALIRON_JSON_IO_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "valiron/oracle.hpp"

namespace valiron {

// ordered_json keeps insertion order on output, so identical inputs always
// serialize byte-identically. All real numbers travel as decimal strings;
// naturals and index vectors stay plain JSON integers.
using ojson = nlohmann::ordered_json;

// Wraps nlohmann's parser so malformed text surfaces as a domain_error whose
// message carries the byte position (CLI exit code 2).
ojson parse_json_text(const std::string& text, const std::string& where);

// Exact decimal/rational string -> Rat ("3", "-5/7", "0.125", "2.5e-3").
Rat rat_from_string(const std::string& s, const std::string& where);

BigFloat bf_from_json(const ojson& j, const std::string& where);

ProximateOrder order_from_json(const ojson& j, const std::string& where);
ojson order_to_json(const ProximateOrder& o);

ExactSeries exact_series_from_json(const ojson& j, const std::string& where);
NumSeries num_series_from_json(const ojson& j, const std::string& where);
ojson series_to_json(const ExactSeries& f);
ojson series_to_json(const NumSeries& f);

ExactSymbol exact_symbol_from_json(const ojson& j, const std::string& where);
NumSymbol num_symbol_from_json(const ojson& j, const std::string& where);
ojson symbol_to_json(const ExactSymbol& s);

ExactHomImages hom_from_json(const ojson& j, const std::string& where);
ojson hom_to_json(const ExactHomImages& h);

ojson growth_scale_to_json(const GrowthScale& g);
ojson lemma_report_to_json(const LemmaReport& r);
ojson type_estimate_to_json(const TypeEstimate& t);
ojson membership_to_json(const MembershipVerdict& v);
ojson symbol_verdict_to_json(const SymbolClassVerdict& v);

ojson corpus_manifest_json(const std::vector<oracle::CorpusRecord>& records,
                           uint64_t master_seed);
std::vector<oracle::CorpusRecord> corpus_manifest_from_json(const ojson& j,
                                                            const std::string& where);

}  // namespace valiron

#endif
