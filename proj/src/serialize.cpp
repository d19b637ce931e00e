#include "fucik/serialize.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace fucik {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

JsonWriter& JsonWriter::begin_object() {
    separate();
    out_ << '{';
    first_in_scope_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ << '}';
    first_in_scope_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separate();
    out_ << '[';
    first_in_scope_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ << ']';
    first_in_scope_.pop_back();
    return *this;
}

void JsonWriter::separate() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!first_in_scope_.empty()) {
        if (!first_in_scope_.back()) out_ << ',';
        first_in_scope_.back() = false;
    }
}

JsonWriter& JsonWriter::key(const std::string& name) {
    separate();
    out_ << '"' << name << "\":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double x) {
    separate();
    out_ << fmt17(x);
    return *this;
}

JsonWriter& JsonWriter::value(long x) {
    separate();
    out_ << x;
    return *this;
}

JsonWriter& JsonWriter::value(int x) {
    separate();
    out_ << x;
    return *this;
}

JsonWriter& JsonWriter::value(bool x) {
    separate();
    out_ << (x ? "true" : "false");
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& x) {
    separate();
    out_ << '"';
    for (char c : x) {
        if (c == '"' || c == '\\') out_ << '\\';
        out_ << c;
    }
    out_ << '"';
    return *this;
}

void write_trunc(JsonWriter& w, const TruncationSpec& trunc) {
    w.begin_object();
    w.key("m_max").value(trunc.m_max);
    w.key("n_max").value(trunc.n_max);
    w.key("grid_s").value(trunc.grid_s);
    w.key("grid_t").value(trunc.grid_t);
    w.key("oversample").value(trunc.oversample);
    w.end_object();
}

void write_field(JsonWriter& w, const SpectralField& field) {
    const ModeSet set = ModeSet::build(field.trunc);
    w.begin_object();
    w.key("trunc");
    write_trunc(w, field.trunc);
    w.key("modes").begin_array();
    for (const auto& m : set.modes) {
        w.begin_array();
        w.value(m.m);
        w.value(m.n);
        w.value(parity_name(m.parity));
        w.end_array();
    }
    w.end_array();
    w.key("coeffs").begin_array();
    for (int i = 0; i < field.coeffs.size(); ++i) w.value(field.coeffs[i]);
    w.end_array();
    w.end_object();
}

namespace {

TruncationSpec trunc_from_json(const nlohmann::json& j) {
    return TruncationSpec(j.at("m_max").get<int>(), j.at("n_max").get<int>(),
                          j.at("grid_s").get<int>(), j.at("grid_t").get<int>(),
                          j.at("oversample").get<double>());
}

}  // namespace

SpectralField read_field(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    SpectralField f = SpectralField::zero(trunc_from_json(j.at("trunc")));
    const auto& coeffs = j.at("coeffs");
    if (static_cast<int>(coeffs.size()) != f.coeffs.size())
        throw DomainError("read_field: coefficient count mismatch");
    for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = coeffs[i].get<double>();
    return f;
}

std::string curve_to_json(const Curve& curve, std::uint64_t seed) {
    JsonWriter w;
    w.begin_object();
    w.key("version").value(std::string(kToolVersion));
    w.key("seed").value(static_cast<long>(seed));
    w.key("config").begin_object();
    w.key("k").value(curve.k);
    w.key("side").value(std::string(curve.side == Side::Lower ? "lower" : "upper"));
    w.key("lambda_k").value(curve.lambda_k);
    w.key(curve.side == Side::Lower ? "eps1" : "eps3").value(curve.eps_first);
    w.key(curve.side == Side::Lower ? "eps2" : "eps4").value(curve.eps_second);
    w.key("square_lo").value(curve.square_lo);
    w.key("square_hi").value(curve.square_hi);
    w.key("trunc");
    write_trunc(w, curve.trunc);
    w.end_object();
    w.key("points").begin_array();
    for (const auto& p : curve.points) {
        w.begin_object();
        w.key("r").value(p.r);
        w.key("a_hat").value(p.a_hat);
        w.key("a").value(p.a);
        w.key("b").value(p.b);
        w.key("residual").value(p.residual);
        w.key("flag").value(p.flag);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

Curve curve_from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    const auto& cfg = j.at("config");
    Curve curve;
    curve.k = cfg.at("k").get<int>();
    curve.side = cfg.at("side").get<std::string>() == "lower" ? Side::Lower : Side::Upper;
    curve.lambda_k = cfg.at("lambda_k").get<long>();
    curve.eps_first = cfg.at(curve.side == Side::Lower ? "eps1" : "eps3").get<double>();
    curve.eps_second = cfg.at(curve.side == Side::Lower ? "eps2" : "eps4").get<double>();
    curve.square_lo = cfg.at("square_lo").get<double>();
    curve.square_hi = cfg.at("square_hi").get<double>();
    curve.trunc = trunc_from_json(cfg.at("trunc"));
    for (const auto& jp : j.at("points")) {
        CurvePoint p;
        p.r = jp.at("r").get<double>();
        p.a_hat = jp.at("a_hat").get<double>();
        p.a = jp.at("a").get<double>();
        p.b = jp.at("b").get<double>();
        p.residual = jp.at("residual").get<double>();
        p.flag = jp.at("flag").get<std::string>();
        curve.points.push_back(std::move(p));
    }
    return curve;
}

std::string curve_to_csv(const Curve& curve) {
    std::string out = "r,a_hat,a,b,residual,flag\n";
    for (const auto& p : curve.points) {
        out += fmt17(p.r) + "," + fmt17(p.a_hat) + "," + fmt17(p.a) + "," + fmt17(p.b) + "," +
               fmt17(p.residual) + "," + p.flag + "\n";
    }
    return out;
}

std::string grid_to_csv(const GridField& grid, const Transform& transform) {
    std::string out = "s,t,value\n";
    for (int i = 0; i < grid.values.rows(); ++i)
        for (int j = 0; j < grid.values.cols(); ++j)
            out += fmt17(transform.node_s(i)) + "," + fmt17(transform.node_t(j)) + "," +
                   fmt17(grid.values(i, j)) + "\n";
    return out;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f << contents;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace fucik
