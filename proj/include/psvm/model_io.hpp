#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "psvm/core.hpp"
#include "psvm/jcc.hpp"
#include "psvm/preprocess.hpp"

namespace psvm {

inline constexpr int kModelFormatVersion = 1;

// On-disk model: algorithm tag, feature names, per-cluster sparse beta maps.
// Load(save(m)) reproduces scores bit-exactly (doubles are written in
// shortest round-trip form).
struct ModelFile {
    int format_version = kModelFormatVersion;
    std::string algorithm;  // slsvm | jcc | l2lr
    std::vector<std::string> feature_names;
    std::variant<LinearModel, JccModel> model;
    std::optional<double> tau;  // calibrated decision threshold
    std::optional<std::string> scaling_ref;

    const LinearModel* as_linear() const { return std::get_if<LinearModel>(&model); }
    const JccModel* as_jcc() const { return std::get_if<JccModel>(&model); }

    std::optional<double> threshold() const;
    void set_threshold(double t);
};

std::string model_to_json(const ModelFile& mf);
ModelFile model_from_json(const std::string& text);

void save_model(const std::string& path, const ModelFile& mf);
ModelFile load_model(const std::string& path);

// Schema file (JSON).
Schema schema_from_json(const std::string& text);
std::string schema_to_json(const Schema& schema);
Schema load_schema(const std::string& path);
void save_schema(const std::string& path, const Schema& schema);

// Pipeline metadata file (JSON).
std::string pipeline_meta_to_json(const PipelineMeta& meta);
PipelineMeta pipeline_meta_from_json(const std::string& text);
void save_pipeline_meta(const std::string& path, const PipelineMeta& meta);
PipelineMeta load_pipeline_meta(const std::string& path);

// Processed dataset: CSV of doubles plus a sidecar meta JSON holding feature
// kinds, controllable flags, bounds and scaling.
void save_dataset(const std::string& csv_path, const std::string& meta_path, const Dataset& data,
                  const std::string& label_name = "label");
Dataset load_dataset(const std::string& csv_path, const std::string& meta_path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace psvm
