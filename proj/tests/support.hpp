// Shared fixtures for the unit tests and the acceptance driver.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chcstr/cata.hpp"
#include "chcstr/chc_text.hpp"
#include "chcstr/cli.hpp"
#include "chcstr/compare.hpp"
#include "chcstr/lfp.hpp"
#include "chcstr/solver.hpp"
#include "chcstr/strengthen.hpp"
#include "chcstr/transform.hpp"
#include "chcstr/translate.hpp"

namespace support {

inline std::string data_path(const std::string& rel) { return std::string(CHCSTR_DATA_DIR) + "/" + rel; }

inline std::string read_data(const std::string& rel) {
  std::ifstream in(data_path(rel), std::ios::binary);
  if (!in) throw std::runtime_error("missing data file " + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// The Reverse program pushed through translation and transformation, with the
/// committed model transported onto our predicate names.
struct ReversePipeline {
  chcstr::mf::Program prog;
  chcstr::Translation tr;
  chcstr::TransformResult r;
  std::vector<chcstr::PredCorrespondence> corr;  // ours <-> golden names
  chcstr::PredicateModel golden_model;           // golden names
  chcstr::PredicateModel model;                  // our names

  ReversePipeline() {
    using namespace chcstr;
    prog = mf::parse_program(read_data("reverse.mfun"));
    tr = translate_to_chcs(prog);
    r = t_cata(tr.system, recognize_all(tr.system));
    ChcSystem named = parse_chc(read_data("golden/reverse.chc") + read_data("golden/defs_reverse.chc"));
    for (const auto& d : r.defs.defs)
      for (const auto& c : named.clauses) {
        if (c.head->pred.rfind("new", 0) != 0) continue;
        if (auto p = head_permutation(d.clause(), c)) corr.push_back({d.name, c.head->pred, *p});
      }
    golden_model = parse_model(read_data("fixtures/reverse_model.smt2"));
    model = transport_model(golden_model, corr);
  }

  std::string golden_name(const std::string& ours) const {
    for (const auto& c : corr)
      if (c.ours == ours) return c.theirs;
    return "";
  }

  /// Output clauses and goals in one list.
  std::vector<chcstr::Clause> output() const {
    std::vector<chcstr::Clause> v = r.output.clauses;
    v.insert(v.end(), r.output.goals.begin(), r.output.goals.end());
    return v;
  }
};

inline const ReversePipeline& reverse() {
  static const ReversePipeline p;
  return p;
}

struct AdequacyResult {
  bool ok = true;
  std::size_t checked = 0;
  std::string detail;
};

/// Interpreter results against the bounded least model of the translation: every
/// call on bounded arguments whose result is in the universe has its atom in the
/// model, and every atom in the model carries the interpreter's result.
inline AdequacyResult adequacy(const chcstr::mf::Program& prog, const chcstr::ChcSystem& sys,
                               const chcstr::Bounds& b) {
  using namespace chcstr;
  AdequacyResult res;
  GroundAtomSet lfp = bounded_lfp(sys, b);
  for (const auto& f : prog.functions) {
    std::vector<std::vector<mf::Value>> domains;
    for (const auto& p : f.params) domains.push_back(mf::enumerate_values(p.type, b.depth, b.lo, b.hi));
    std::map<std::vector<Term>, std::vector<Term>> expected;  // argument terms -> result terms
    std::vector<std::size_t> idx(domains.size(), 0);
    bool empty = false;
    for (const auto& d : domains) empty |= d.empty();
    while (!empty) {
      std::vector<mf::Value> args;
      std::vector<Term> in;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        args.push_back(domains[k][idx[k]]);
        for (const auto& t : args.back().to_terms()) in.push_back(t);
      }
      auto r = mf::eval(prog, f.name, args);
      if (!r.diverged) {
        std::vector<Term> out = r.value.to_terms();
        expected[in] = out;
        bool covered = true;
        for (const auto& t : out) covered &= in_universe(t, b);
        if (covered) {
          Atom a{f.name, in};
          a.args.insert(a.args.end(), out.begin(), out.end());
          ++res.checked;
          if (!lfp.contains(a)) {
            res.ok = false;
            res.detail = "missing from the least model: " + print_atom(a);
            return res;
          }
        }
      }
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == domains[k].size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
    std::size_t n = 0;
    for (const auto& p : f.params) n += p.type.sorts().size();
    for (const auto& row : lfp.tuples(f.name)) {
      std::vector<Term> in(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n));
      std::vector<Term> out(row.begin() + static_cast<std::ptrdiff_t>(n), row.end());
      auto it = expected.find(in);
      ++res.checked;
      if (it == expected.end() || it->second != out) {
        res.ok = false;
        res.detail = "not an interpreter result: " + print_atom(Atom{f.name, row});
        return res;
      }
    }
  }
  return res;
}

}  // namespace support
