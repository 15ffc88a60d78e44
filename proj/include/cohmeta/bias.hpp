#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cohmeta/data.hpp"

namespace cohmeta {

/// plus: consistent pairs, where the summary of the better system (higher mean
/// human score) is also human-rated higher. minus: inverted pairs.
enum class BiasDirection { plus, minus };

struct SignedTau {
  std::optional<double> value;  // nullopt when the reference pair set is empty
  std::size_t pair_count = 0;   // |H+| or |H-|
};

/// tau+ / tau- between a better system `better` and a worse system `worse`,
/// over all ordered document pairs (d_i, d_j) including d_i = d_j:
///   plus:  H+ = {H(d_i, better) > H(d_j, worse)}, correct if P agrees strictly
///   minus: H- = {H(d_i, better) < H(d_j, worse)}, correct if P agrees strictly
///   value = (2 |H ∩ P| - |H|) / |H|
/// Throws std::invalid_argument unless `better` has a strictly higher mean
/// human score than `worse`; CoverageError on key mismatch.
SignedTau tau_signed(const PredictionSet& human, const PredictionSet& pred,
                     const std::string& better, const std::string& worse, BiasDirection direction);

/// Square matrix over systems sorted by descending mean human score (ties by
/// system id). Entry (i, j) is tau+(s_i, s_j) above the diagonal, tau-(s_j, s_i)
/// below it, and 0 on it.
struct BiasMatrix {
  std::vector<std::string> system_order;
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<std::vector<std::size_t>> pair_counts;

  std::size_t size() const { return system_order.size(); }
};

BiasMatrix bias_matrix(const PredictionSet& human, const PredictionSet& pred);

enum class RenderFormat { csv, svg };

struct SvgOptions {
  double cell_size = 40.0;
  double label_width = 160.0;
};

/// Cells as decimals, undefined cells empty, diagonal 0.
void write_bias_csv(std::ostream& out, const BiasMatrix& m);
/// |H+| above the diagonal, |H-| below, empty diagonal.
void write_bias_counts_csv(std::ostream& out, const BiasMatrix& m);
/// Circle area proportional to the pair count; fill on a diverging
/// blue-white-red scale over [-1, 1]. Output is deterministic.
void write_bias_svg(std::ostream& out, const BiasMatrix& m, const SvgOptions& options = {});

/// Circle radius for a cell, as drawn by write_bias_svg.
double bias_circle_radius(const BiasMatrix& m, std::size_t i, std::size_t j,
                          const SvgOptions& options = {});

void render_bias_matrix(const BiasMatrix& m, const std::filesystem::path& path,
                        RenderFormat format, const SvgOptions& options = {});

}  // namespace cohmeta
