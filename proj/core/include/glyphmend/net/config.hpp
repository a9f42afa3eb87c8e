// Network hyperparameters shared by the encoder-decoder model and the
// encoder-only baseline.
#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "glyphmend/contour.hpp"

namespace glyphmend::net {

struct ModelConfig {
  int d_model = 256;      // embedding width, split into four equal groups
  int layers = 4;         // L: layers per stack (the baseline stacks 2L)
  int heads = 4;          // M: attention heads; must divide d_model
  int contour_classes = SequenceLimits{}.contour_classes();  // 5
  int point_classes = SequenceLimits{}.point_classes();      // 103
  int flag_classes = 4;
  int max_len = SequenceLimits{}.max_tokens();               // 410
  int ffn_width = 0;      // feed-forward inner width; 0 means 4 * d_model
  double dropout = 0.1;
  bool sinusoidal_position = false;  // optional additive positional encoding

  int ffn() const { return ffn_width > 0 ? ffn_width : 4 * d_model; }
  int group() const { return d_model / 4; }
  int head_dim() const { return d_model / heads; }

  void validate() const {
    if (d_model <= 0 || layers <= 0 || heads <= 0) {
      throw std::invalid_argument("model dimensions must be positive");
    }
    if (d_model % 4 != 0) {
      throw std::invalid_argument("d_model must be divisible by 4 (four "
                                  "embedding groups), got " +
                                  std::to_string(d_model));
    }
    if (d_model % heads != 0) {
      throw std::invalid_argument("d_model must be divisible by the head "
                                  "count, got " + std::to_string(d_model) +
                                  " / " + std::to_string(heads));
    }
    if (dropout < 0.0 || dropout >= 1.0) {
      throw std::invalid_argument("dropout must lie in [0, 1)");
    }
  }
};

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"d_model", c.d_model},
                     {"layers", c.layers},
                     {"heads", c.heads},
                     {"contour_classes", c.contour_classes},
                     {"point_classes", c.point_classes},
                     {"flag_classes", c.flag_classes},
                     {"max_len", c.max_len},
                     {"ffn_width", c.ffn_width},
                     {"dropout", c.dropout},
                     {"sinusoidal_position", c.sinusoidal_position}};
}

inline void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.d_model = j.value("d_model", c.d_model);
  c.layers = j.value("layers", c.layers);
  c.heads = j.value("heads", c.heads);
  c.contour_classes = j.value("contour_classes", c.contour_classes);
  c.point_classes = j.value("point_classes", c.point_classes);
  c.flag_classes = j.value("flag_classes", c.flag_classes);
  c.max_len = j.value("max_len", c.max_len);
  c.ffn_width = j.value("ffn_width", c.ffn_width);
  c.dropout = j.value("dropout", c.dropout);
  c.sinusoidal_position = j.value("sinusoidal_position", c.sinusoidal_position);
}

}  // namespace glyphmend::net
