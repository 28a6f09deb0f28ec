#include "autgrowth/words.hpp"

#include <cctype>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_set>

namespace autgrowth {

AuxiliaryGroup AuxiliaryGroup::free_group(std::vector<Gen> inverse) {
  AuxiliaryGroup aux;
  aux.mode_ = AuxMode::free_group;
  const std::size_t n = inverse.size();
  aux.block_of_.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    aux.block_of_[s] = static_cast<int>(s);
    aux.blocks_.push_back({static_cast<Gen>(s)});
    if (inverse[s] != kNoGen && inverse[s] >= n) throw Error("inverse map out of range");
  }
  aux.inverse_ = std::move(inverse);
  aux.product_.assign(n * n, kNoGen);
  return aux;
}

AuxiliaryGroup AuxiliaryGroup::free_group(const GeneratorTable& gens) { return free_group(inverse_map(gens)); }

AuxiliaryGroup AuxiliaryGroup::free_product(std::size_t generator_count, std::vector<std::vector<Gen>> blocks,
                                            std::vector<std::vector<Gen>> tables) {
  if (tables.size() != blocks.size()) throw Error("one table per block expected");
  AuxiliaryGroup aux;
  aux.mode_ = AuxMode::free_product;
  const std::size_t n = generator_count;
  aux.block_of_.assign(n, -1);
  aux.product_.assign(n * n, kNoGen);
  aux.inverse_.assign(n, kNoGen);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    if (tables[b].size() != block.size() * block.size()) throw Error("block table has wrong size");
    for (Gen s : block) {
      if (s >= n) throw Error("block generator out of range");
      if (aux.block_of_[s] != -1) throw Error("blocks are not disjoint");
      aux.block_of_[s] = static_cast<int>(b);
    }
    for (std::size_t i = 0; i < block.size(); ++i) {
      for (std::size_t j = 0; j < block.size(); ++j) {
        const Gen r = tables[b][i * block.size() + j];
        aux.product_[block[i] * n + block[j]] = r;
        if (r == kNoGen) aux.inverse_[block[i]] = block[j];
      }
    }
  }
  for (std::size_t s = 0; s < n; ++s)
    if (aux.block_of_[s] == -1) throw Error("blocks do not cover every generator");
  aux.blocks_ = std::move(blocks);
  return aux;
}

AuxiliaryGroup AuxiliaryGroup::free_product(const GeneratorTable& gens, std::vector<std::vector<Gen>> blocks) {
  std::vector<std::vector<Gen>> tables;
  for (const auto& block : blocks) {
    std::vector<Gen> table(block.size() * block.size(), kNoGen);
    for (std::size_t i = 0; i < block.size(); ++i) {
      for (std::size_t j = 0; j < block.size(); ++j) {
        const Word st{block[i], block[j]};
        bool found = false;
        if (is_identity(st, gens)) {
          table[i * block.size() + j] = kNoGen;
          found = true;
        }
        for (std::size_t k = 0; k < block.size() && !found; ++k) {
          if (equal_elements(st, Word{block[k]}, gens)) {
            table[i * block.size() + j] = block[k];
            found = true;
          }
        }
        if (!found)
          throw Error("block is not closed: " + gens.name(block[i]) + gens.name(block[j]) +
                      " is not in the block");
      }
    }
    tables.push_back(std::move(table));
  }
  return free_product(gens.size(), std::move(blocks), std::move(tables));
}

void AuxiliaryGroup::push_reduced(Word& w, Gen t) const {
  if (w.empty()) {
    w.push_back(t);
    return;
  }
  const Gen s = w.back();
  if (mode_ == AuxMode::free_group) {
    if (inverse_[s] == t)
      w.pop_back();
    else
      w.push_back(t);
    return;
  }
  if (block_of_[s] != block_of_[t]) {
    w.push_back(t);
    return;
  }
  const Gen r = product(s, t);
  w.pop_back();
  if (r != kNoGen) w.push_back(r);
}

std::string AuxiliaryGroup::describe(const GeneratorTable& gens) const {
  if (mode_ == AuxMode::free_group) return "free";
  std::string out;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (b) out.push_back('|');
    for (std::size_t i = 0; i < blocks_[b].size(); ++i) {
      if (i) out.push_back(',');
      out += gens.name(blocks_[b][i]);
    }
  }
  return out;
}

std::vector<std::vector<Gen>> parse_blocks(std::string_view text, const GeneratorTable& gens) {
  std::vector<std::vector<Gen>> blocks(1);
  std::string token;
  auto flush = [&] {
    std::string name;
    for (char c : token)
      if (!std::isspace(static_cast<unsigned char>(c))) name.push_back(c);
    token.clear();
    if (name.empty()) return;
    auto g = gens.find(name);
    if (!g) throw Error("unknown generator '" + name + "' in blocks");
    blocks.back().push_back(*g);
  };
  for (char c : text) {
    if (c == '|' || c == ';') {
      flush();
      blocks.emplace_back();
    } else if (c == ',') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  return blocks;
}

AuxiliaryGroup make_aux(const GeneratorTable& gens, std::string_view blocks) {
  if (blocks == "free") return AuxiliaryGroup::free_group(gens);
  return AuxiliaryGroup::free_product(gens, parse_blocks(blocks, gens));
}

Word reduce(const Word& w, const AuxiliaryGroup& aux) {
  Word out;
  out.reserve(w.size());
  for (Gen s : w) {
    if (s >= aux.generator_count()) throw Error("letter not in S");
    aux.push_reduced(out, s);
  }
  return out;
}

bool is_reduced(const Word& w, const AuxiliaryGroup& aux) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (!aux.joins_reduced(w[i - 1], w[i])) return false;
  return true;
}

WeightVector::WeightVector(std::vector<double> values, double epsilon) : values_(std::move(values)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0)) throw Error("weight floor must be positive");
  for (double v : values_)
    if (!std::isfinite(v) || v < epsilon_ * (1.0 - 1e-12)) throw Error("weight below floor");
}

WeightVector WeightVector::uniform(std::size_t n, double epsilon) {
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)), epsilon);
}

WeightVector WeightVector::normalized(std::vector<double> raw, double epsilon) {
  if (raw.empty()) throw Error("empty weight vector");
  double sum = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v) || v < 0.0) throw Error("weights must be finite and non-negative");
    sum += v;
  }
  if (!(sum > 0.0)) throw Error("weights sum to zero");
  for (auto& v : raw) v /= sum;
  // clamp to the floor, then rescale the unclamped mass
  for (int round = 0; round < 64; ++round) {
    double fixed = 0.0, free = 0.0;
    for (double v : raw) (v <= epsilon ? fixed : free) += (v <= epsilon ? epsilon : v);
    if (free <= 0.0) throw Error("weight floor too large for this many generators");
    const double scale = (1.0 - fixed) / free;
    bool changed = false;
    for (auto& v : raw) {
      if (v <= epsilon) {
        v = epsilon;
      } else {
        v *= scale;
        if (v < epsilon) changed = true;
      }
    }
    if (!changed) break;
  }
  return WeightVector(std::move(raw), epsilon);
}

std::vector<std::uint32_t> letter_counts(const Word& w, std::size_t generator_count) {
  std::vector<std::uint32_t> counts(generator_count, 0);
  for (Gen s : w) ++counts.at(s);
  return counts;
}

double weighted_length(std::span<const std::uint32_t> counts, const WeightVector& pi) {
  double total = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s)
    if (counts[s]) total += counts[s] * pi[static_cast<Gen>(s)];
  return total;
}

AuxLength aux_length(const Word& w, const WeightVector& pi) {
  const auto counts = letter_counts(w, pi.size());
  return {w.size(), weighted_length(counts, pi)};
}

std::vector<TriangularConstraint> triangular_constraints(const AuxiliaryGroup& aux) {
  std::vector<TriangularConstraint> out;
  if (aux.mode() != AuxMode::free_product) return out;
  for (const auto& block : aux.blocks())
    for (Gen s : block)
      for (Gen t : block) {
        const Gen r = aux.product(s, t);
        if (r != kNoGen) out.push_back({r, s, t});
      }
  return out;
}

double min_triangular_slack(const WeightVector& pi, const AuxiliaryGroup& aux) {
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& c : triangular_constraints(aux))
    slack = std::min(slack, pi[c.left] + pi[c.right] - pi[c.product]);
  return slack;
}

bool is_triangular(const WeightVector& pi, const AuxiliaryGroup& aux, double margin) {
  return min_triangular_slack(pi, aux) >= margin;
}

namespace {

Word maybe_reduce(Word w, const AuxiliaryGroup* aux) {
  if (!aux) return w;
  return reduce(w, *aux);
}

}  // namespace

bool is_identity(const Word& w, const GeneratorTable& gens, const AuxiliaryGroup* aux) {
  std::unordered_set<Word, WordHash> seen;
  std::deque<Word> queue;
  Word start = maybe_reduce(w, aux);
  if (start.empty()) return true;
  seen.insert(start);
  queue.push_back(std::move(start));
  while (!queue.empty()) {
    Word u = std::move(queue.front());
    queue.pop_front();
    auto img = wreath(u, gens);
    if (!is_identity_perm(img.perm)) return false;
    for (auto& sec : img.sections) {
      Word r = maybe_reduce(std::move(sec), aux);
      if (r.empty()) continue;
      if (seen.insert(r).second) queue.push_back(std::move(r));
    }
  }
  return true;
}

bool equal_elements(const Word& u, const Word& v, const GeneratorTable& gens, const AuxiliaryGroup* aux) {
  struct PairHash {
    std::size_t operator()(const std::pair<Word, Word>& p) const noexcept {
      return WordHash{}(p.first) * 31 + WordHash{}(p.second);
    }
  };
  std::unordered_set<std::pair<Word, Word>, PairHash> seen;
  std::deque<std::pair<Word, Word>> queue;
  auto push = [&](Word a, Word b) {
    a = maybe_reduce(std::move(a), aux);
    b = maybe_reduce(std::move(b), aux);
    if (a == b) return;
    auto key = std::make_pair(std::move(a), std::move(b));
    if (seen.insert(key).second) queue.push_back(std::move(key));
  };
  push(u, v);
  while (!queue.empty()) {
    auto [a, b] = std::move(queue.front());
    queue.pop_front();
    auto ia = wreath(a, gens);
    auto ib = wreath(b, gens);
    if (ia.perm != ib.perm) return false;
    for (std::size_t x = 0; x < gens.degree(); ++x) push(std::move(ia.sections[x]), std::move(ib.sections[x]));
  }
  return true;
}

std::vector<Gen> inverse_map(const GeneratorTable& gens) {
  std::vector<Gen> inv(gens.size(), kNoGen);
  for (Gen s = 0; s < gens.size(); ++s) {
    if (is_identity(Word{s, s}, gens)) {
      inv[s] = s;
      continue;
    }
    for (Gen t = 0; t < gens.size(); ++t) {
      if (t != s && is_identity(Word{s, t}, gens)) {
        inv[s] = t;
        break;
      }
    }
  }
  return inv;
}

std::string FactorReport::summary(const GeneratorTable& gens) const {
  if (errors.empty()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i) os << "; ";
    const auto& e = errors[i];
    if (e.left != kNoGen) os << "(" << gens.name(e.left) << "," << (e.right != kNoGen ? gens.name(e.right) : "e") << "): ";
    os << e.message;
  }
  return os.str();
}

FactorReport verify_factors(const AuxiliaryGroup& aux, const GeneratorTable& gens) {
  FactorReport report;
  const std::size_t n = gens.size();
  if (aux.generator_count() != n) {
    report.errors.push_back({kNoGen, kNoGen, "cover has a different generator count"});
    return report;
  }
  if (aux.mode() == AuxMode::free_group) {
    for (Gen s = 0; s < n; ++s) {
      const Gen t = aux.inverse(s);
      if (t != kNoGen && !is_identity(Word{s, t}, gens))
        report.errors.push_back({s, t, "declared inverse does not hold in G"});
    }
    return report;
  }
  for (std::size_t b = 0; b < aux.blocks().size(); ++b) {
    const auto& block = aux.blocks()[b];
    auto in_block = [&](Gen r) { return r == kNoGen || (r < n && aux.block_of(r) == static_cast<int>(b)); };
    // multiplication including the identity as kNoGen
    auto mul = [&](Gen s, Gen t) -> Gen {
      if (s == kNoGen) return t;
      if (t == kNoGen) return s;
      return aux.product(s, t);
    };
    bool closed = true;
    for (Gen s : block) {
      bool has_inverse = false;
      for (Gen t : block) {
        const Gen r = aux.product(s, t);
        if (!in_block(r)) {
          report.errors.push_back({s, t, "table entry leaves the block"});
          closed = false;
          continue;
        }
        if (r == kNoGen) has_inverse = true;
        Word rhs;
        if (r != kNoGen) rhs.push_back(r);
        if (!equal_elements(Word{s, t}, rhs, gens))
          report.errors.push_back({s, t,
                                   "declared product " + (r == kNoGen ? std::string("e") : gens.name(r)) +
                                       " does not hold in G"});
      }
      if (!has_inverse) report.errors.push_back({s, kNoGen, "no inverse in the block table"});
    }
    if (!closed) continue;
    bool associative = true;
    for (Gen s : block)
      for (Gen t : block)
        for (Gen u : block)
          if (associative && mul(mul(s, t), u) != mul(s, mul(t, u))) {
            report.errors.push_back({s, t, "block table is not associative"});
            associative = false;
          }
  }
  return report;
}

}  // namespace autgrowth
