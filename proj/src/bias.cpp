#include "cohmeta/bias.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cohmeta/report.hpp"

namespace cohmeta {

namespace {

struct Scored {
  double human;
  double pred;
};

using BySystem = std::map<std::string, std::vector<Scored>>;

BySystem group_by_system(const PredictionSet& human, const PredictionSet& pred) {
  require_same_keys(human, pred);
  BySystem out;
  for (const auto& [key, h] : human.scores) out[key.system_id].push_back({h, pred.scores.at(key)});
  return out;
}

double mean_human(const std::vector<Scored>& v) {
  std::vector<double> h;
  for (const auto& s : v) h.push_back(s.human);
  return stable_mean(std::move(h));
}

SignedTau signed_tau(const std::vector<Scored>& better, const std::vector<Scored>& worse,
                     BiasDirection direction) {
  std::size_t total = 0;
  std::size_t correct = 0;
  for (const auto& a : better) {
    for (const auto& b : worse) {
      if (direction == BiasDirection::plus) {
        if (a.human > b.human) {
          ++total;
          if (a.pred > b.pred) ++correct;
        }
      } else if (a.human < b.human) {
        ++total;
        if (a.pred < b.pred) ++correct;
      }
    }
  }
  SignedTau out;
  out.pair_count = total;
  if (total > 0) {
    out.value = (2.0 * static_cast<double>(correct) - static_cast<double>(total)) /
                static_cast<double>(total);
  }
  return out;
}

}  // namespace

SignedTau tau_signed(const PredictionSet& human, const PredictionSet& pred,
                     const std::string& better, const std::string& worse, BiasDirection direction) {
  const BySystem groups = group_by_system(human, pred);
  const auto b = groups.find(better);
  const auto w = groups.find(worse);
  if (b == groups.end()) throw std::invalid_argument("unknown system '" + better + "'");
  if (w == groups.end()) throw std::invalid_argument("unknown system '" + worse + "'");
  if (!(mean_human(b->second) > mean_human(w->second))) {
    throw std::invalid_argument("system '" + better + "' does not have a higher mean human score than '" +
                                worse + "'");
  }
  return signed_tau(b->second, w->second, direction);
}

BiasMatrix bias_matrix(const PredictionSet& human, const PredictionSet& pred) {
  const BySystem groups = group_by_system(human, pred);
  if (groups.size() < 2) throw std::invalid_argument("fewer than 2 systems");

  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& [system, v] : groups) ranked.emplace_back(system, mean_human(v));
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second > b.second || (a.second == b.second && a.first < b.first);
  });

  BiasMatrix m;
  const std::size_t n = ranked.size();
  for (const auto& r : ranked) m.system_order.push_back(r.first);
  m.values.assign(n, std::vector<std::optional<double>>(n));
  m.pair_counts.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    m.values[i][i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& better = groups.at(m.system_order[i]);
      const auto& worse = groups.at(m.system_order[j]);
      const SignedTau plus = signed_tau(better, worse, BiasDirection::plus);
      const SignedTau minus = signed_tau(better, worse, BiasDirection::minus);
      m.values[i][j] = plus.value;
      m.pair_counts[i][j] = plus.pair_count;
      m.values[j][i] = minus.value;
      m.pair_counts[j][i] = minus.pair_count;
    }
  }
  return m;
}

void write_bias_csv(std::ostream& out, const BiasMatrix& m) {
  out << "system";
  for (const auto& s : m.system_order) out << ',' << report::csv_escape(s);
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << report::csv_escape(m.system_order[i]);
    for (std::size_t j = 0; j < m.size(); ++j) out << ',' << report::format_number(m.values[i][j], 6);
    out << '\n';
  }
}

void write_bias_counts_csv(std::ostream& out, const BiasMatrix& m) {
  out << "system";
  for (const auto& s : m.system_order) out << ',' << report::csv_escape(s);
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << report::csv_escape(m.system_order[i]);
    for (std::size_t j = 0; j < m.size(); ++j) {
      out << ',';
      if (i != j) out << m.pair_counts[i][j];
    }
    out << '\n';
  }
}

namespace {

std::size_t max_count(const BiasMatrix& m) {
  std::size_t best = 0;
  for (const auto& row : m.pair_counts) {
    for (std::size_t c : row) best = std::max(best, c);
  }
  return best;
}

// Diverging scale: -1 blue (33,102,172), 0 white, +1 red (178,24,43).
std::string fill_color(double v) {
  v = std::clamp(v, -1.0, 1.0);
  const double t = std::abs(v);
  const int r_end = v < 0 ? 33 : 178;
  const int g_end = v < 0 ? 102 : 24;
  const int b_end = v < 0 ? 172 : 43;
  auto lerp = [t](int end) { return static_cast<int>(std::lround(255.0 + t * (end - 255.0))); };
  return fmt::format("#{:02x}{:02x}{:02x}", lerp(r_end), lerp(g_end), lerp(b_end));
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

double bias_circle_radius(const BiasMatrix& m, std::size_t i, std::size_t j,
                          const SvgOptions& options) {
  const std::size_t top = max_count(m);
  if (i == j || top == 0 || m.pair_counts[i][j] == 0) return 0.0;
  const double max_radius = 0.45 * options.cell_size;
  return max_radius *
         std::sqrt(static_cast<double>(m.pair_counts[i][j]) / static_cast<double>(top));
}

void write_bias_svg(std::ostream& out, const BiasMatrix& m, const SvgOptions& options) {
  if (!(options.cell_size > 0.0) || options.label_width < 0.0) {
    throw std::invalid_argument("invalid SVG dimensions");
  }
  const double cell = options.cell_size;
  const double margin = options.label_width;
  const double extent = margin + cell * static_cast<double>(m.size());
  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.2f}\" height=\"{0:.2f}\" "
      "viewBox=\"0 0 {0:.2f} {0:.2f}\" font-family=\"sans-serif\" font-size=\"{1:.2f}\">\n",
      extent, cell * 0.3);
  out << fmt::format("<rect x=\"0\" y=\"0\" width=\"{0:.2f}\" height=\"{0:.2f}\" fill=\"#ffffff\"/>\n",
                     extent);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double center = margin + (static_cast<double>(k) + 0.5) * cell;
    const std::string label = xml_escape(m.system_order[k]);
    out << fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>\n",
        margin - 4.0, center, label);
    out << fmt::format(
        "<text transform=\"translate({:.2f},{:.2f}) rotate(-90)\" text-anchor=\"start\" "
        "dominant-baseline=\"middle\">{}</text>\n",
        center, margin - 4.0, label);
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double x = margin + static_cast<double>(j) * cell;
      const double y = margin + static_cast<double>(i) * cell;
      out << fmt::format(
          "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" "
          "stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n",
          x, y, cell, cell, i == j ? "#eeeeee" : "none");
      const double r = bias_circle_radius(m, i, j, options);
      if (r <= 0.0 || !m.values[i][j]) continue;
      out << fmt::format(
          "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.4f}\" fill=\"{}\" stroke=\"#555555\" "
          "stroke-width=\"0.5\"><title>{} vs {}: {:.3f} ({} pairs)</title></circle>\n",
          x + 0.5 * cell, y + 0.5 * cell, r, fill_color(*m.values[i][j]),
          xml_escape(m.system_order[i]), xml_escape(m.system_order[j]), *m.values[i][j],
          m.pair_counts[i][j]);
    }
  }
  out << "</svg>\n";
}

void render_bias_matrix(const BiasMatrix& m, const std::filesystem::path& path,
                        RenderFormat format, const SvgOptions& options) {
  std::ostringstream buffer;
  if (format == RenderFormat::csv) {
    write_bias_csv(buffer, m);
  } else {
    write_bias_svg(buffer, m, options);
  }
  report::write_file_atomic(path, buffer.str());
}

}  // namespace cohmeta
