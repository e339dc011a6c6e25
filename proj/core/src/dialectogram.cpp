#include "dialectoscope/dialectogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "dialectoscope/error.hpp"
#include "dialectoscope/measures.hpp"
#include "dialectoscope/textio.hpp"

namespace dialectoscope {

namespace {

constexpr double kZeroOffset = 1e-12;
constexpr Eigen::Index kFocalBlock = 512;
const char* const kCsvHeader = "token,alpha1,alpha2,freq1,freq2,ec_class";

Vector offset_of(const AlignedPair& pair, std::size_t i) {
  const auto r = static_cast<Eigen::Index>(i);
  return (pair.first.vectors.row(r) - pair.second.vectors.row(r)).transpose();
}

std::vector<ScoredWord> extremes(const Eigen::VectorXd& values, const std::vector<std::string>& tokens,
                                 std::size_t k, bool positive) {
  std::vector<std::size_t> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto better = [&](std::size_t a, std::size_t b) {
    const double va = values[static_cast<Eigen::Index>(a)];
    const double vb = values[static_cast<Eigen::Index>(b)];
    if (va != vb) return positive ? va > vb : va < vb;
    return a < b;
  };
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    better);
  std::vector<ScoredWord> out;
  for (std::size_t i = 0; i < take; ++i)
    out.push_back({order[i], tokens[order[i]], values[static_cast<Eigen::Index>(order[i])]});
  return out;
}

nlohmann::ordered_json scored_json(const std::vector<ScoredWord>& words) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& w : words) arr.push_back({{"token", w.token}, {"value", w.value}});
  return arr;
}

}  // namespace

std::string to_string(EcClass c) {
  switch (c) {
    case EcClass::Both: return "both";
    case EcClass::Only1: return "only1";
    case EcClass::Only2: return "only2";
    case EcClass::Neither: return "neither";
  }
  return "neither";
}

EcClass parse_ec_class(const std::string& name) {
  if (name == "both") return EcClass::Both;
  if (name == "only1") return EcClass::Only1;
  if (name == "only2") return EcClass::Only2;
  if (name == "neither") return EcClass::Neither;
  throw DataError("unknown ec_class '" + name + "'");
}

Projection project_offset(const AlignedPair& pair, std::size_t focal) {
  if (focal >= pair.size()) throw DataError("focal index out of range");
  const Vector o = offset_of(pair, focal);
  Projection p;
  p.offset_norm = o.norm();
  if (!(p.offset_norm > kZeroOffset)) {
    throw DataError("focal word '" + pair.first.tokens[focal] +
                    "' has a zero offset (used identically in both corpora)");
  }
  const Vector u = o / p.offset_norm;
  const Eigen::VectorXd a1 = pair.first.vectors * u;
  const Eigen::VectorXd a2 = pair.second.vectors * u;
  p.alpha1.assign(a1.data(), a1.data() + a1.size());
  p.alpha2.assign(a2.data(), a2.data() + a2.size());
  return p;
}

Dialectogram build_dialectogram(const AlignedPair& pair, const Vocabulary& vocab,
                                const CoocMatrix& cooc1, const CoocMatrix& cooc2,
                                std::size_t focal, const DialectogramOptions& options) {
  if (vocab.size() != pair.size() || cooc1.size() != pair.size() || cooc2.size() != pair.size()) {
    throw DataError("dialectogram inputs are bound to vocabularies of different sizes");
  }
  if (focal >= vocab.size()) throw DataError("focal index out of range");
  const Projection proj = project_offset(pair, focal);

  Dialectogram d;
  d.focal = vocab.token(focal);
  d.focal_index = focal;
  d.offset_norm = proj.offset_norm;
  d.translation_1to2 = vocab.token(translate(pair, focal, Direction::FirstToSecond));
  d.translation_2to1 = vocab.token(translate(pair, focal, Direction::SecondToFirst));
  const std::size_t top = std::min(options.exclude_top, vocab.size());
  for (std::size_t i = 0; i < top; ++i) d.excluded.push_back(vocab.token(i));

  const auto c1 = cooc1.row_cols(focal);
  const auto c2 = cooc2.row_cols(focal);
  std::vector<std::uint32_t> neighbors;
  std::set_union(c1.begin(), c1.end(), c2.begin(), c2.end(), std::back_inserter(neighbors));
  for (auto j : neighbors) {
    if (j == focal || j < top) continue;
    const bool hi1 = excess_cooccurrence(cooc1, focal, j) > 1.0;
    const bool hi2 = excess_cooccurrence(cooc2, focal, j) > 1.0;
    DialectogramRecord r;
    r.token = vocab.token(j);
    r.alpha1 = proj.alpha1[j];
    r.alpha2 = proj.alpha2[j];
    r.freq1 = vocab.count1(j);
    r.freq2 = vocab.count2(j);
    r.ec_class = hi1 && hi2 ? EcClass::Both
                 : hi1      ? EcClass::Only1
                 : hi2      ? EcClass::Only2
                            : EcClass::Neither;
    d.records.push_back(std::move(r));
  }
  return d;
}

MeanOffsetProjection mean_offset_projection(const AlignedPair& pair,
                                            const std::vector<std::size_t>& members,
                                            std::size_t top_k) {
  if (members.size() < 2) throw DataError("mean offset needs at least two words");
  for (auto m : members)
    if (m >= pair.size()) throw DataError("word index out of range");
  const auto dim = static_cast<Eigen::Index>(pair.dim());
  std::vector<Vector> offsets;
  for (auto m : members) offsets.push_back(offset_of(pair, m));

  std::vector<double> sign(members.size(), 1.0);
  const auto mean = [&] {
    Vector sum = Vector::Zero(dim);
    for (std::size_t k = 0; k < offsets.size(); ++k) sum += sign[k] * offsets[k];
    return Vector(sum / static_cast<double>(offsets.size()));
  };

  Vector reference = mean();
  if (reference.norm() < kZeroOffset) {
    // The members cancel out; orient everything against the first nonzero one.
    auto it = std::find_if(offsets.begin(), offsets.end(),
                           [](const Vector& o) { return o.norm() >= kZeroOffset; });
    if (it == offsets.end()) throw DataError("degenerate mean offset: every member offset is zero");
    reference = *it;
  }
  // One flip-and-recompute pass, repeated while any member still points
  // against the mean. Each pass strictly grows the norm of the summed offsets,
  // so this terminates.
  Vector direction = reference;
  for (std::size_t pass = 0;; ++pass) {
    bool changed = false;
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      if (sign[k] * offsets[k].dot(direction) < 0.0) {
        sign[k] = -sign[k];
        changed = true;
      }
    }
    if (pass > 0 && !changed) break;
    direction = mean();
    if (direction.norm() < kZeroOffset) throw DataError("degenerate mean offset after sign flips");
  }

  MeanOffsetProjection out;
  out.members = members;
  for (auto m : members) out.member_tokens.push_back(pair.first.tokens[m]);
  out.direction = direction / direction.norm();
  for (double s : sign) out.flipped.push_back(s < 0.0);
  const Eigen::VectorXd a1 = pair.first.vectors * out.direction;
  const Eigen::VectorXd a2 = pair.second.vectors * out.direction;
  for (auto m : members) {
    out.member_alpha1.push_back(a1[static_cast<Eigen::Index>(m)]);
    out.member_alpha2.push_back(a2[static_cast<Eigen::Index>(m)]);
  }
  out.top_positive1 = extremes(a1, pair.first.tokens, top_k, true);
  out.top_negative1 = extremes(a1, pair.first.tokens, top_k, false);
  out.top_positive2 = extremes(a2, pair.first.tokens, top_k, true);
  out.top_negative2 = extremes(a2, pair.first.tokens, top_k, false);
  return out;
}

AggregateScore aggregate_characteristic_use(const AlignedPair& pair,
                                            const std::vector<std::size_t>& focals,
                                            double threshold, int threads) {
  if (focals.empty()) throw ConfigError("aggregate needs at least one focal word");
  if (!(threshold > 0.0)) throw ConfigError("aggregate threshold must be > 0");
  const auto n = static_cast<Eigen::Index>(pair.size());
  AggregateScore out;
  out.threshold = threshold;

  std::vector<Vector> units;
  for (auto f : focals) {
    if (f >= pair.size()) throw DataError("focal index out of range");
    const Vector o = offset_of(pair, f);
    const double norm = o.norm();
    if (!(norm > kZeroOffset)) continue;
    out.focals.push_back(f);
    units.push_back(o / norm);
  }
  const auto used = static_cast<Eigen::Index>(units.size());
  Matrix offsets(used, static_cast<Eigen::Index>(pair.dim()));
  for (Eigen::Index k = 0; k < used; ++k) offsets.row(k) = units[static_cast<std::size_t>(k)];
  const Matrix diagonal = 0.5 * (pair.first.vectors + pair.second.vectors);

  const Eigen::Index blocks = (used + kFocalBlock - 1) / kFocalBlock;
  const auto workers = std::max<Eigen::Index>(1, std::min<Eigen::Index>(threads, blocks));
  std::vector<std::vector<int>> pos(static_cast<std::size_t>(workers),
                                    std::vector<int>(static_cast<std::size_t>(n), 0));
  std::vector<std::vector<int>> neg = pos;
  auto run = [&](Eigen::Index w) {
    auto& p = pos[static_cast<std::size_t>(w)];
    auto& q = neg[static_cast<std::size_t>(w)];
    Eigen::MatrixXd m;
    for (Eigen::Index blk = w; blk < blocks; blk += workers) {
      const Eigen::Index begin = blk * kFocalBlock;
      const Eigen::Index len = std::min(used, begin + kFocalBlock) - begin;
      m.noalias() = diagonal * offsets.middleRows(begin, len).transpose();
      for (Eigen::Index c = 0; c < len; ++c) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const double v = m(j, c);
          if (v > threshold) ++p[static_cast<std::size_t>(j)];
          else if (v < -threshold) ++q[static_cast<std::size_t>(j)];
        }
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (Eigen::Index w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  out.rows.resize(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < out.rows.size(); ++j) {
    auto& row = out.rows[j];
    row.index = j;
    row.token = pair.first.tokens[j];
    for (Eigen::Index w = 0; w < workers; ++w) {
      row.count_pos += pos[static_cast<std::size_t>(w)][j];
      row.count_neg += neg[static_cast<std::size_t>(w)][j];
    }
    row.score = row.count_pos - row.count_neg;
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const AggregateRow& a, const AggregateRow& b) { return a.score > b.score; });
  return out;
}

std::string dialectogram_to_json(const Dialectogram& d) {
  nlohmann::ordered_json j;
  j["focal"] = d.focal;
  j["focal_index"] = d.focal_index;
  j["offset_norm"] = d.offset_norm;
  j["translation_1to2"] = d.translation_1to2;
  j["translation_2to1"] = d.translation_2to1;
  j["excluded"] = d.excluded;
  auto records = nlohmann::ordered_json::array();
  for (const auto& r : d.records) {
    nlohmann::ordered_json rec;
    rec["token"] = r.token;
    rec["alpha1"] = r.alpha1;
    rec["alpha2"] = r.alpha2;
    rec["freq1"] = r.freq1;
    rec["freq2"] = r.freq2;
    rec["ec_class"] = to_string(r.ec_class);
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  return j.dump(2) + "\n";
}

Dialectogram dialectogram_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Dialectogram d;
    d.focal = j.at("focal").get<std::string>();
    d.focal_index = j.value("focal_index", std::size_t{0});
    d.offset_norm = j.at("offset_norm").get<double>();
    d.translation_1to2 = j.at("translation_1to2").get<std::string>();
    d.translation_2to1 = j.at("translation_2to1").get<std::string>();
    d.excluded = j.value("excluded", std::vector<std::string>{});
    for (const auto& rec : j.at("records")) {
      DialectogramRecord r;
      r.token = rec.at("token").get<std::string>();
      r.alpha1 = rec.at("alpha1").get<double>();
      r.alpha2 = rec.at("alpha2").get<double>();
      r.freq1 = rec.at("freq1").get<std::uint64_t>();
      r.freq2 = rec.at("freq2").get<std::uint64_t>();
      r.ec_class = parse_ec_class(rec.at("ec_class").get<std::string>());
      d.records.push_back(std::move(r));
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed dialectogram JSON: ") + e.what());
  }
}

std::string dialectogram_to_csv(const Dialectogram& d) {
  std::string out;
  out += "#focal=" + d.focal + "\n";
  out += "#focal_index=" + std::to_string(d.focal_index) + "\n";
  out += "#offset_norm=" + format_real(d.offset_norm) + "\n";
  out += "#translation_1to2=" + d.translation_1to2 + "\n";
  out += "#translation_2to1=" + d.translation_2to1 + "\n";
  out += "#excluded=";
  for (std::size_t i = 0; i < d.excluded.size(); ++i) out += (i ? " " : "") + d.excluded[i];
  out += "\n";
  out += kCsvHeader;
  out += '\n';
  for (const auto& r : d.records) {
    out += csv_field(r.token) + ',' + format_real(r.alpha1) + ',' + format_real(r.alpha2) + ',' +
           std::to_string(r.freq1) + ',' + std::to_string(r.freq2) + ',' + to_string(r.ec_class) +
           '\n';
  }
  return out;
}

Dialectogram dialectogram_from_csv(const std::string& text) {
  Dialectogram d;
  bool header = false;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto fail = [&](const std::string& what) {
      throw DataError("dialectogram CSV line " + std::to_string(line_no) + ": " + what);
    };
    if (!header && line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail("expected #key=value");
      const auto key = line.substr(1, eq - 1);
      const std::string value(line.substr(eq + 1));
      if (key == "focal") d.focal = value;
      else if (key == "focal_index") d.focal_index = static_cast<std::size_t>(parse_integer(value));
      else if (key == "offset_norm") d.offset_norm = parse_real(value);
      else if (key == "translation_1to2") d.translation_1to2 = value;
      else if (key == "translation_2to1") d.translation_2to1 = value;
      else if (key == "excluded") {
        for (auto t : split(value, ' '))
          if (!t.empty()) d.excluded.emplace_back(t);
      }
      continue;
    }
    if (!header) {
      if (line != kCsvHeader) fail("unexpected header");
      header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 6) fail("expected 6 fields");
    d.records.push_back({f[0], parse_real(f[1]), parse_real(f[2]),
                         static_cast<std::uint64_t>(parse_integer(f[3])),
                         static_cast<std::uint64_t>(parse_integer(f[4])), parse_ec_class(f[5])});
  }
  if (!header) throw DataError("dialectogram CSV has no header");
  return d;
}

ExportFormat parse_export_format(const std::string& name) {
  if (name == "json") return ExportFormat::Json;
  if (name == "csv") return ExportFormat::Csv;
  if (name == "svg") return ExportFormat::Svg;
  throw ConfigError("unknown export format '" + name + "' (json|csv|svg)");
}

void export_dialectogram(const Dialectogram& d, ExportFormat format,
                         const std::filesystem::path& path, const SvgOptions& options) {
  switch (format) {
    case ExportFormat::Json: write_file(path, dialectogram_to_json(d)); break;
    case ExportFormat::Csv: write_file(path, dialectogram_to_csv(d)); break;
    case ExportFormat::Svg: write_file(path, dialectogram_to_svg(d, options)); break;
  }
}

Dialectogram import_dialectogram(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".json") return dialectogram_from_json(read_file(path));
  if (ext == ".csv") return dialectogram_from_csv(read_file(path));
  throw ConfigError("cannot import dialectogram from '" + path.string() + "' (need .json or .csv)");
}

std::string mean_offset_to_json(const MeanOffsetProjection& m) {
  nlohmann::ordered_json j;
  auto members = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < m.members.size(); ++k) {
    members.push_back({{"token", m.member_tokens[k]},
                       {"flipped", static_cast<bool>(m.flipped[k])},
                       {"alpha1", m.member_alpha1[k]},
                       {"alpha2", m.member_alpha2[k]}});
  }
  j["members"] = std::move(members);
  j["direction"] = std::vector<double>(m.direction.data(), m.direction.data() + m.direction.size());
  j["top_positive1"] = scored_json(m.top_positive1);
  j["top_negative1"] = scored_json(m.top_negative1);
  j["top_positive2"] = scored_json(m.top_positive2);
  j["top_negative2"] = scored_json(m.top_negative2);
  return j.dump(2) + "\n";
}

std::string aggregate_to_csv(const AggregateScore& a) {
  std::string out = "#threshold=" + format_real(a.threshold) + "\n";
  out += "#focal_count=" + std::to_string(a.focals.size()) + "\n";
  out += "token,count_pos,count_neg,score\n";
  for (const auto& r : a.rows) {
    out += csv_field(r.token) + ',' + std::to_string(r.count_pos) + ',' +
           std::to_string(r.count_neg) + ',' + std::to_string(r.score) + '\n';
  }
  return out;
}

}  // namespace dialectoscope
