#pragma once

// Deterministic artifact emission: floats printed with 17 significant
// digits, object keys in insertion order, no timestamps.  Identical inputs
// and seeds must give byte-identical files.

#include <sstream>
#include <string>
#include <vector>

#include "fucik/curve.hpp"
#include "fucik/nonhomog.hpp"
#include "fucik/spectral.hpp"

namespace fucik {

inline const char* kToolVersion = "0.1.0";

std::string fmt17(double x);

// Minimal ordered JSON writer.
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& name);
    JsonWriter& value(double x);
    JsonWriter& value(long x);
    JsonWriter& value(int x);
    JsonWriter& value(bool x);
    JsonWriter& value(const std::string& x);
    std::string str() const { return out_.str(); }

  private:
    void separate();
    std::ostringstream out_;
    std::vector<bool> first_in_scope_;
    bool pending_key_ = false;
};

void write_trunc(JsonWriter& w, const TruncationSpec& trunc);
void write_field(JsonWriter& w, const SpectralField& field);
SpectralField read_field(const std::string& json_text);

std::string curve_to_json(const Curve& curve, std::uint64_t seed);
Curve curve_from_json(const std::string& json_text);
std::string curve_to_csv(const Curve& curve);

std::string grid_to_csv(const GridField& grid, const Transform& transform);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace fucik
