#include "phylokern/seqkernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

#include "phylokern/parallel.hpp"

namespace phylokern::seqkernel {

namespace {

constexpr std::array<char, 4> kAlphabet = {'A', 'C', 'G', 'T'};

bool is_acgt(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T'; }

// Start positions of fully-ACGT windows of the given length.
std::vector<std::uint32_t> valid_windows(const std::string& s, int len) {
  std::vector<std::uint32_t> starts;
  if (len <= 0 || s.size() < static_cast<std::size_t>(len)) return starts;
  int clean = 0;  // number of consecutive ACGT chars ending at i
  for (std::size_t i = 0; i < s.size(); ++i) {
    clean = is_acgt(s[i]) ? clean + 1 : 0;
    if (clean >= len) starts.push_back(static_cast<std::uint32_t>(i + 1 - len));
  }
  return starts;
}

// Sorted (feature, count) profile; the inner product of two profiles is a
// sorted-merge join.
struct SortedProfile {
  std::vector<std::string_view> feats;  // distinct, ascending
  std::vector<std::uint32_t> counts;
  std::vector<std::string> storage;  // backing buffers for owned features
};

void compress_sorted(std::vector<std::string_view>& views, SortedProfile& out) {
  std::sort(views.begin(), views.end());
  for (std::size_t i = 0; i < views.size();) {
    std::size_t j = i + 1;
    while (j < views.size() && views[j] == views[i]) ++j;
    out.feats.push_back(views[i]);
    out.counts.push_back(static_cast<std::uint32_t>(j - i));
    i = j;
  }
}

SortedProfile spectrum_profile(const std::string& s, int k) {
  SortedProfile p;
  std::vector<std::string_view> views;
  for (std::uint32_t start : valid_windows(s, k))
    views.emplace_back(s.data() + start, static_cast<std::size_t>(k));
  compress_sorted(views, p);
  return p;
}

// Gappy-pair features are (a, j, b): k-mer a, exactly j skipped characters,
// k-mer b. Encoded as one (2k+1)-byte string with j in the first byte so
// distinct gap counts are distinct features.
SortedProfile gappy_profile(const std::string& s, int k, int g) {
  SortedProfile p;
  const auto anchors = valid_windows(s, k);
  std::vector<bool> anchor_at(s.size() + 1, false);
  for (std::uint32_t a : anchors) anchor_at[a] = true;

  for (std::uint32_t a : anchors) {
    for (int j = 0; j <= g; ++j) {
      const std::size_t b = static_cast<std::size_t>(a) + k + j;
      if (b + k > s.size()) break;
      if (!anchor_at[b]) continue;
      std::string feat;
      feat.reserve(2 * k + 1);
      feat.push_back(static_cast<char>(j));
      feat.append(s, a, static_cast<std::size_t>(k));
      feat.append(s, b, static_cast<std::size_t>(k));
      p.storage.push_back(std::move(feat));
    }
  }
  std::vector<std::string_view> views(p.storage.begin(), p.storage.end());
  compress_sorted(views, p);
  return p;
}

double profile_dot(const SortedProfile& x, const SortedProfile& y) {
  double total = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.feats.size() && j < y.feats.size()) {
    const int cmp = x.feats[i].compare(y.feats[j]);
    if (cmp < 0) {
      ++i;
    } else if (cmp > 0) {
      ++j;
    } else {
      total += static_cast<double>(x.counts[i]) * static_cast<double>(y.counts[j]);
      ++i;
      ++j;
    }
  }
  return total;
}

// Mismatch kernel: depth-first co-traversal of the populated k-mer trie.
// Each candidate is a window start with its mismatch count so far; a branch
// is pruned as soon as either sequence has no surviving candidates, so only
// subtrees populated by both strings are ever visited.
struct MismatchCand {
  std::uint32_t pos;
  std::uint8_t mism;
};

class MismatchTraversal {
 public:
  MismatchTraversal(const std::string& a, const std::string& b, int k, int m)
      : a_(a), b_(b), k_(k), m_(m) {}

  double run() {
    std::vector<MismatchCand> ca, cb;
    for (std::uint32_t s : valid_windows(a_, k_)) ca.push_back({s, 0});
    for (std::uint32_t s : valid_windows(b_, k_)) cb.push_back({s, 0});
    if (ca.empty() || cb.empty()) return 0.0;
    total_ = 0.0;
    descend(0, ca, cb);
    return total_;
  }

 private:
  void descend(int depth, const std::vector<MismatchCand>& ca,
               const std::vector<MismatchCand>& cb) {
    if (depth == k_) {
      total_ += static_cast<double>(ca.size()) * static_cast<double>(cb.size());
      return;
    }
    for (char c : kAlphabet) {
      std::vector<MismatchCand> na = extend(a_, ca, depth, c);
      if (na.empty()) continue;
      std::vector<MismatchCand> nb = extend(b_, cb, depth, c);
      if (nb.empty()) continue;
      descend(depth + 1, na, nb);
    }
  }

  std::vector<MismatchCand> extend(const std::string& s, const std::vector<MismatchCand>& cands,
                                   int depth, char c) const {
    std::vector<MismatchCand> next;
    next.reserve(cands.size());
    for (const MismatchCand& cand : cands) {
      const std::uint8_t mism =
          static_cast<std::uint8_t>(cand.mism + (s[cand.pos + depth] != c ? 1 : 0));
      if (mism <= m_) next.push_back({cand.pos, mism});
    }
    return next;
  }

  const std::string& a_;
  const std::string& b_;
  int k_;
  int m_;
  double total_ = 0.0;
};

int encode_base(char c) {
  switch (c) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default: return -1;
  }
}

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Spectrum: return "spectrum";
    case Variant::Mismatch: return "mismatch";
    case Variant::GappyPair: return "gappy";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "spectrum") return Variant::Spectrum;
  if (name == "mismatch") return Variant::Mismatch;
  if (name == "gappy" || name == "gappy-pair" || name == "gappypair") return Variant::GappyPair;
  throw ValidationError("unknown kernel variant '" + name + "'");
}

void KmerConfig::validate() const {
  if (k < 1) throw ValidationError("kmer config: k must be >= 1");
  if (variant == Variant::Mismatch && (m < 1 || m > k - 1))
    throw ValidationError("kmer config: mismatch kernel requires 1 <= m <= k-1");
  if (variant == Variant::GappyPair && g < 0)
    throw ValidationError("kmer config: gappy-pair kernel requires g >= 0");
}

std::string KmerConfig::describe() const {
  std::string out = variant_name(variant) + " k=" + std::to_string(k);
  if (variant == Variant::Mismatch) out += " m=" + std::to_string(m);
  if (variant == Variant::GappyPair) out += " g=" + std::to_string(g);
  return out;
}

double kernel_entry(const bioio::SequenceRecord& z, const bioio::SequenceRecord& z_other,
                    const KmerConfig& cfg) {
  cfg.validate();
  switch (cfg.variant) {
    case Variant::Spectrum:
      return profile_dot(spectrum_profile(z.bases, cfg.k), spectrum_profile(z_other.bases, cfg.k));
    case Variant::GappyPair:
      return profile_dot(gappy_profile(z.bases, cfg.k, cfg.g),
                         gappy_profile(z_other.bases, cfg.k, cfg.g));
    case Variant::Mismatch:
      return MismatchTraversal(z.bases, z_other.bases, cfg.k, cfg.m).run();
  }
  return 0.0;
}

SimilarityMatrix build_similarity_matrix(const std::vector<bioio::SequenceRecord>& seqs,
                                         const KmerConfig& cfg, const BuildOptions& opts) {
  cfg.validate();
  if (seqs.empty()) throw ValidationError("similarity matrix: need at least one sequence");
  const std::size_t p = seqs.size();

  SimilarityMatrix out;
  out.config = cfg;
  out.normalized = opts.normalize;
  out.otu_ids.reserve(p);
  for (const auto& rec : seqs) out.otu_ids.push_back(rec.id);
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));

  // Per-sequence sparse feature profiles are extracted once; every pair is
  // then an independent merge (or trie co-traversal for mismatch).
  std::vector<SortedProfile> profiles;
  if (cfg.variant != Variant::Mismatch) {
    profiles.resize(p);
    parallel_for(p, opts.threads, [&](std::size_t i) {
      profiles[i] = cfg.variant == Variant::Spectrum
                        ? spectrum_profile(seqs[i].bases, cfg.k)
                        : gappy_profile(seqs[i].bases, cfg.k, cfg.g);
    });
  }

  const std::size_t n_pairs = p * (p + 1) / 2;
  parallel_for(n_pairs, opts.threads, [&](std::size_t t) {
    // Unrank t into (i, j), i <= j.
    const std::size_t i =
        static_cast<std::size_t>((std::sqrt(8.0 * static_cast<double>(t) + 1.0) - 1.0) / 2.0);
    std::size_t row = i;
    std::size_t base = row * (row + 1) / 2;
    while (base + row + 1 <= t) {
      ++row;
      base = row * (row + 1) / 2;
    }
    while (base > t) {
      --row;
      base = row * (row + 1) / 2;
    }
    const std::size_t jj = row;
    const std::size_t ii = t - base;
    double v;
    if (cfg.variant == Variant::Mismatch) {
      v = MismatchTraversal(seqs[ii].bases, seqs[jj].bases, cfg.k, cfg.m).run();
    } else {
      v = profile_dot(profiles[ii], profiles[jj]);
    }
    out.values(static_cast<Eigen::Index>(ii), static_cast<Eigen::Index>(jj)) = v;
    out.values(static_cast<Eigen::Index>(jj), static_cast<Eigen::Index>(ii)) = v;
  });

  if (opts.normalize) {
    Eigen::VectorXd diag = out.values.diagonal();
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        const double d = diag(static_cast<Eigen::Index>(i)) * diag(static_cast<Eigen::Index>(j));
        auto& v = out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        v = d > 0.0 ? v / std::sqrt(d) : 0.0;
      }
    }
  }
  return out;
}

double brute_force_entry(const bioio::SequenceRecord& z, const bioio::SequenceRecord& z_other,
                         const KmerConfig& cfg) {
  cfg.validate();
  const std::string& a = z.bases;
  const std::string& b = z_other.bases;
  const int k = cfg.k;

  if (cfg.variant == Variant::GappyPair) {
    const double space = (cfg.g + 1.0) * std::pow(4.0, 2.0 * k);
    if (space > 1e7)
      throw ValidationError("brute force: gappy-pair feature space exceeds guard");
    const std::size_t dim = static_cast<std::size_t>(1) << (2 * 2 * k);  // 4^(2k)
    double total = 0.0;
    for (int j = 0; j <= cfg.g; ++j) {
      std::vector<double> fa(dim, 0.0), fb(dim, 0.0);
      auto fill = [&](const std::string& s, std::vector<double>& f) {
        const auto anchors = valid_windows(s, k);
        std::vector<bool> anchor_at(s.size() + 1, false);
        for (std::uint32_t st : anchors) anchor_at[st] = true;
        for (std::uint32_t st : anchors) {
          const std::size_t second = static_cast<std::size_t>(st) + k + j;
          if (second + k > s.size() || !anchor_at[second]) continue;
          std::size_t code = 0;
          for (int t = 0; t < k; ++t) code = code * 4 + encode_base(s[st + t]);
          for (int t = 0; t < k; ++t) code = code * 4 + encode_base(s[second + t]);
          f[code] += 1.0;
        }
      };
      fill(a, fa);
      fill(b, fb);
      for (std::size_t u = 0; u < dim; ++u) total += fa[u] * fb[u];
    }
    return total;
  }

  if (std::pow(4.0, k) > 1e6) throw ValidationError("brute force: k-mer space exceeds guard");
  const std::size_t dim = static_cast<std::size_t>(1) << (2 * k);
  const int max_mism = cfg.variant == Variant::Mismatch ? cfg.m : 0;

  std::string u(static_cast<std::size_t>(k), 'A');
  auto count_occurrences = [&](const std::string& s) {
    double n = 0.0;
    for (std::uint32_t st : valid_windows(s, k)) {
      int mism = 0;
      for (int t = 0; t < k && mism <= max_mism; ++t)
        if (s[st + t] != u[static_cast<std::size_t>(t)]) ++mism;
      if (mism <= max_mism) n += 1.0;
    }
    return n;
  };

  double total = 0.0;
  for (std::size_t code = 0; code < dim; ++code) {
    std::size_t rest = code;
    for (int t = k - 1; t >= 0; --t) {
      u[static_cast<std::size_t>(t)] = kAlphabet[rest & 3];
      rest >>= 2;
    }
    total += count_occurrences(a) * count_occurrences(b);
  }
  return total;
}

}  // namespace phylokern::seqkernel
