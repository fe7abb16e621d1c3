#include "mptrack/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mptrack/detector.hpp"
#include "mptrack/errors.hpp"

namespace mptrack {
namespace {

using nlohmann::json;

[[noreturn]] void fail_field(const std::string& path, const std::string& why) {
  throw ValidationError(path + ": " + why);
}

// --- generic JSON helpers (strict: unknown keys rejected) -------------------

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      fail_field(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_double(const json& j, const char* key, const std::string& path,
                  double fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number()) {
    fail_field(path.empty() ? key : path + "." + key, "expected a number");
  }
  return v->get<double>();
}

std::int64_t get_int(const json& j, const char* key, const std::string& path,
                     std::int64_t fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) {
    fail_field(path.empty() ? key : path + "." + key, "expected an integer");
  }
  return v->get<std::int64_t>();
}

bool get_bool(const json& j, const char* key, const std::string& path,
              bool fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) {
    fail_field(path.empty() ? key : path + "." + key, "expected a boolean");
  }
  return v->get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& path,
                       const std::string& fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_string()) {
    fail_field(path.empty() ? key : path + "." + key, "expected a string");
  }
  return v->get<std::string>();
}

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ValidationError(what + ": malformed JSON");
  return j;
}

// --- JSONL plumbing ----------------------------------------------------------

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<json> lines;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": malformed record");
    }
    lines.push_back(std::move(j));
  }
  return lines;
}

void write_jsonl(const std::string& path, const std::vector<json>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const json& j : lines) out << j.dump() << '\n';
  if (!out) throw IoError("write failed for " + path);
}

// Data records come from external tools too, so required fields are checked
// but extra fields are ignored.
double need_double(const json& j, const char* key, const std::string& where) {
  const json* v = find(j, key);
  if (!v || !v->is_number()) {
    throw ValidationError(where + ": missing or non-numeric \"" +
                          std::string(key) + "\"");
  }
  return v->get<double>();
}

std::int64_t need_int(const json& j, const char* key,
                      const std::string& where) {
  const json* v = find(j, key);
  if (!v || !v->is_number_integer()) {
    throw ValidationError(where + ": missing or non-integer \"" +
                          std::string(key) + "\"");
  }
  return v->get<std::int64_t>();
}

bool need_bool(const json& j, const char* key, const std::string& where) {
  const json* v = find(j, key);
  if (!v || !v->is_boolean()) {
    throw ValidationError(where + ": missing or non-boolean \"" +
                          std::string(key) + "\"");
  }
  return v->get<bool>();
}

std::string line_ref(const std::string& path, std::size_t idx) {
  return path + " record " + std::to_string(idx + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

// --- correspondence files ----------------------------------------------------

std::vector<CorrespondenceRecord> read_correspondences(
    const std::string& path) {
  std::vector<CorrespondenceRecord> out;
  const std::vector<json> lines = read_jsonl(path);
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json& j = lines[i];
    const std::string where = line_ref(path, i);
    CorrespondenceRecord rec;
    rec.frame_id = static_cast<int>(need_int(j, "frame", where));
    rec.ref_frame_id = static_cast<int>(need_int(j, "ref_frame", where));
    const json* pairs = find(j, "pairs");
    if (!pairs || !pairs->is_array()) {
      throw ValidationError(where + ": missing \"pairs\" array");
    }
    rec.correspondences.pairs.reserve(pairs->size());
    for (const json& p : *pairs) {
      if (!p.is_array() || p.size() != 4 ||
          !std::all_of(p.begin(), p.end(),
                       [](const json& v) { return v.is_number(); })) {
        throw ValidationError(where +
                              ": each pair must be [sx, sy, dx, dy] numbers");
      }
      Correspondence c;
      c.src = {p[0].get<double>(), p[1].get<double>()};
      c.dst = {p[2].get<double>(), p[3].get<double>()};
      rec.correspondences.pairs.push_back(c);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_correspondences(const std::string& path,
                           const std::vector<CorrespondenceRecord>& records) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const CorrespondenceRecord& rec : records) {
    json pairs = json::array();
    for (const Correspondence& c : rec.correspondences.pairs) {
      pairs.push_back({c.src.x, c.src.y, c.dst.x, c.dst.y});
    }
    lines.push_back({{"frame", rec.frame_id},
                     {"ref_frame", rec.ref_frame_id},
                     {"pairs", std::move(pairs)}});
  }
  write_jsonl(path, lines);
}

// --- detection files ----------------------------------------------------------

std::vector<std::pair<int, Detection>> read_detections(
    const std::string& path) {
  std::vector<std::pair<int, Detection>> out;
  const std::vector<json> lines = read_jsonl(path);
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json& j = lines[i];
    const std::string where = line_ref(path, i);
    Detection d;
    const int frame = static_cast<int>(need_int(j, "frame", where));
    d.x = need_double(j, "x", where);
    d.y = need_double(j, "y", where);
    d.w = need_double(j, "w", where);
    d.h = need_double(j, "h", where);
    d.confidence = need_double(j, "conf", where);
    out.emplace_back(frame, d);
  }
  return out;
}

void write_detections(const std::string& path,
                      const std::vector<std::pair<int, Detection>>& records) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const auto& [frame, d] : records) {
    lines.push_back({{"frame", frame},
                     {"x", d.x},
                     {"y", d.y},
                     {"w", d.w},
                     {"h", d.h},
                     {"conf", d.confidence}});
  }
  write_jsonl(path, lines);
}

// --- ground-truth files ---------------------------------------------------------

std::vector<std::pair<int, GroundTruth>> read_ground_truth(
    const std::string& path) {
  std::vector<std::pair<int, GroundTruth>> out;
  const std::vector<json> lines = read_jsonl(path);
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json& j = lines[i];
    const std::string where = line_ref(path, i);
    GroundTruth g;
    const int frame = static_cast<int>(need_int(j, "frame", where));
    g.box.x = need_double(j, "x", where);
    g.box.y = need_double(j, "y", where);
    g.box.w = need_double(j, "w", where);
    g.box.h = need_double(j, "h", where);
    g.vx = need_double(j, "vx", where);
    g.vy = need_double(j, "vy", where);
    out.emplace_back(frame, g);
  }
  return out;
}

void write_ground_truth(
    const std::string& path,
    const std::vector<std::pair<int, GroundTruth>>& records) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const auto& [frame, g] : records) {
    lines.push_back({{"frame", frame},
                     {"x", g.box.x},
                     {"y", g.box.y},
                     {"w", g.box.w},
                     {"h", g.box.h},
                     {"vx", g.vx},
                     {"vy", g.vy}});
  }
  write_jsonl(path, lines);
}

// --- result files ---------------------------------------------------------------

std::vector<FrameResult> read_results(const std::string& path) {
  std::vector<FrameResult> out;
  const std::vector<json> lines = read_jsonl(path);
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json& j = lines[i];
    const std::string where = line_ref(path, i);
    FrameResult r;
    r.frame_id = static_cast<int>(need_int(j, "frame", where));
    r.predicted_box_camera.x = need_double(j, "pred_x", where);
    r.predicted_box_camera.y = need_double(j, "pred_y", where);
    r.predicted_box_camera.w = need_double(j, "pred_w", where);
    r.predicted_box_camera.h = need_double(j, "pred_h", where);
    r.predicted_vx_ref = need_double(j, "pred_vx_ref", where);
    r.predicted_vy_ref = need_double(j, "pred_vy_ref", where);
    r.search_region_camera.center.x = need_double(j, "region_x", where);
    r.search_region_camera.center.y = need_double(j, "region_y", where);
    r.search_region_camera.side = need_double(j, "region_side", where);
    r.output_box_camera.x = need_double(j, "out_x", where);
    r.output_box_camera.y = need_double(j, "out_y", where);
    r.output_box_camera.w = need_double(j, "out_w", where);
    r.output_box_camera.h = need_double(j, "out_h", where);
    r.updated = need_bool(j, "updated", where);
    r.failure = need_bool(j, "failure", where);
    r.skipped = need_bool(j, "skipped", where);
    out.push_back(r);
  }
  return out;
}

void write_results(const std::string& path,
                   const std::vector<FrameResult>& results) {
  std::vector<json> lines;
  lines.reserve(results.size());
  for (const FrameResult& r : results) {
    lines.push_back({{"frame", r.frame_id},
                     {"pred_x", r.predicted_box_camera.x},
                     {"pred_y", r.predicted_box_camera.y},
                     {"pred_w", r.predicted_box_camera.w},
                     {"pred_h", r.predicted_box_camera.h},
                     {"pred_vx_ref", r.predicted_vx_ref},
                     {"pred_vy_ref", r.predicted_vy_ref},
                     {"region_x", r.search_region_camera.center.x},
                     {"region_y", r.search_region_camera.center.y},
                     {"region_side", r.search_region_camera.side},
                     {"out_x", r.output_box_camera.x},
                     {"out_y", r.output_box_camera.y},
                     {"out_w", r.output_box_camera.w},
                     {"out_h", r.output_box_camera.h},
                     {"updated", r.updated},
                     {"failure", r.failure},
                     {"skipped", r.skipped}});
  }
  write_jsonl(path, lines);
}

// --- merge loader ----------------------------------------------------------------

std::vector<SequenceRecord> load_sequence(const std::string& correspondences,
                                          const std::string& detections,
                                          const std::string& ground_truth) {
  const std::vector<CorrespondenceRecord> corr =
      read_correspondences(correspondences);
  std::map<int, Detection> det_by_frame;
  if (!detections.empty()) {
    for (const auto& [frame, d] : read_detections(detections)) {
      if (!det_by_frame.emplace(frame, d).second) {
        throw ValidationError(detections + ": duplicate frame " +
                              std::to_string(frame));
      }
    }
  }
  std::map<int, GroundTruth> gt_by_frame;
  if (!ground_truth.empty()) {
    for (const auto& [frame, g] : read_ground_truth(ground_truth)) {
      if (!gt_by_frame.emplace(frame, g).second) {
        throw ValidationError(ground_truth + ": duplicate frame " +
                              std::to_string(frame));
      }
    }
  }

  std::vector<SequenceRecord> out;
  out.reserve(corr.size());
  std::set<int> seen;
  for (const CorrespondenceRecord& c : corr) {
    if (!seen.insert(c.frame_id).second) {
      throw ValidationError(correspondences + ": duplicate frame " +
                            std::to_string(c.frame_id));
    }
    SequenceRecord rec;
    rec.frame_id = c.frame_id;
    rec.ref_frame_id = c.ref_frame_id;
    rec.correspondences = c.correspondences;
    if (auto it = det_by_frame.find(c.frame_id); it != det_by_frame.end()) {
      rec.detection = it->second;
    }
    if (auto it = gt_by_frame.find(c.frame_id); it != gt_by_frame.end()) {
      rec.gt = it->second;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

// --- tracker config (sectioned key=value text) -------------------------------------

namespace {

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<IniEntry> parse_ini(const std::string& text) {
  std::vector<IniEntry> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ValidationError("config line " + std::to_string(line_no) +
                              ": unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    IniEntry e;
    e.section = section;
    e.key = trim(t.substr(0, eq));
    e.value = trim(t.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty() || e.value.empty()) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": empty key or value");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

double ini_double(const IniEntry& e) {
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("config line " + std::to_string(e.line) + ": " +
                          e.key + " must be a number");
  }
  return v;
}

std::int64_t ini_int(const IniEntry& e) {
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("config line " + std::to_string(e.line) + ": " +
                          e.key + " must be an integer");
  }
  return v;
}

bool ini_bool(const IniEntry& e) {
  if (e.value == "true" || e.value == "on" || e.value == "1") return true;
  if (e.value == "false" || e.value == "off" || e.value == "0") return false;
  throw ValidationError("config line " + std::to_string(e.line) + ": " +
                        e.key + " must be a boolean (true/false/on/off/1/0)");
}

}  // namespace

TrackerConfig parse_config(const std::string& text) {
  TrackerConfig cfg;
  for (const IniEntry& e : parse_ini(text)) {
    if (e.section == "tracker") {
      if (e.key == "n") {
        cfg.n = static_cast<int>(ini_int(e));
      } else if (e.key == "theta_v") {
        cfg.theta_v = ini_double(e);
      } else if (e.key == "theta_d") {
        cfg.theta_d = ini_double(e);
      } else if (e.key == "reinit_skip") {
        cfg.reinit_skip = static_cast<int>(ini_int(e));
      } else if (e.key == "velocity_handoff_inflation") {
        cfg.velocity_handoff_inflation = ini_double(e);
      } else {
        throw ValidationError("config: unknown key tracker." + e.key);
      }
    } else if (e.section == "kalman") {
      if (e.key == "process_pos_std") {
        cfg.kalman.process_pos_std = ini_double(e);
      } else if (e.key == "process_size_std") {
        cfg.kalman.process_size_std = ini_double(e);
      } else if (e.key == "process_vel_std") {
        cfg.kalman.process_vel_std = ini_double(e);
      } else if (e.key == "meas_pos_std") {
        cfg.kalman.meas_pos_std = ini_double(e);
      } else if (e.key == "meas_size_std") {
        cfg.kalman.meas_size_std = ini_double(e);
      } else if (e.key == "init_pos_std") {
        cfg.kalman.init_pos_std = ini_double(e);
      } else if (e.key == "init_size_std") {
        cfg.kalman.init_size_std = ini_double(e);
      } else if (e.key == "init_vel_std") {
        cfg.kalman.init_vel_std = ini_double(e);
      } else {
        throw ValidationError("config: unknown key kalman." + e.key);
      }
    } else if (e.section == "ransac") {
      if (e.key == "iterations") {
        cfg.ransac.iterations = static_cast<int>(ini_int(e));
      } else if (e.key == "inlier_threshold") {
        cfg.ransac.inlier_threshold = ini_double(e);
      } else if (e.key == "min_inliers") {
        cfg.ransac.min_inliers = static_cast<int>(ini_int(e));
      } else if (e.key == "max_outlier_ratio") {
        cfg.ransac.max_outlier_ratio = ini_double(e);
      } else if (e.key == "confidence") {
        cfg.ransac.confidence = ini_double(e);
      } else {
        throw ValidationError("config: unknown key ransac." + e.key);
      }
    } else if (e.section == "ablation") {
      if (e.key == "motion_decouple") {
        cfg.ablation.motion_decouple = ini_bool(e);
      } else if (e.key == "motion_prediction") {
        cfg.ablation.motion_prediction = ini_bool(e);
      } else if (e.key == "adaptive_search_region") {
        cfg.ablation.adaptive_search_region = ini_bool(e);
      } else if (e.key == "fixed_k") {
        cfg.ablation.fixed_k = ini_double(e);
      } else {
        throw ValidationError("config: unknown key ablation." + e.key);
      }
    } else {
      throw ValidationError("config: unknown section [" + e.section + "]");
    }
  }
  cfg.validate();
  return cfg;
}

TrackerConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path));
}

std::string render_config(const TrackerConfig& cfg) {
  std::ostringstream os;
  os << "[tracker]\n"
     << "n = " << cfg.n << "\n"
     << "theta_v = " << fmt_double(cfg.theta_v) << "\n"
     << "theta_d = " << fmt_double(cfg.theta_d) << "\n"
     << "reinit_skip = " << cfg.reinit_skip << "\n"
     << "velocity_handoff_inflation = "
     << fmt_double(cfg.velocity_handoff_inflation) << "\n\n";
  os << "[kalman]\n"
     << "process_pos_std = " << fmt_double(cfg.kalman.process_pos_std) << "\n"
     << "process_size_std = " << fmt_double(cfg.kalman.process_size_std)
     << "\n"
     << "process_vel_std = " << fmt_double(cfg.kalman.process_vel_std) << "\n"
     << "meas_pos_std = " << fmt_double(cfg.kalman.meas_pos_std) << "\n"
     << "meas_size_std = " << fmt_double(cfg.kalman.meas_size_std) << "\n"
     << "init_pos_std = " << fmt_double(cfg.kalman.init_pos_std) << "\n"
     << "init_size_std = " << fmt_double(cfg.kalman.init_size_std) << "\n"
     << "init_vel_std = " << fmt_double(cfg.kalman.init_vel_std) << "\n\n";
  os << "[ransac]\n"
     << "iterations = " << cfg.ransac.iterations << "\n"
     << "inlier_threshold = " << fmt_double(cfg.ransac.inlier_threshold)
     << "\n"
     << "min_inliers = " << cfg.ransac.min_inliers << "\n"
     << "max_outlier_ratio = " << fmt_double(cfg.ransac.max_outlier_ratio)
     << "\n"
     << "confidence = " << fmt_double(cfg.ransac.confidence) << "\n\n";
  os << "[ablation]\n"
     << "motion_decouple = " << (cfg.ablation.motion_decouple ? "true" : "false")
     << "\n"
     << "motion_prediction = "
     << (cfg.ablation.motion_prediction ? "true" : "false") << "\n"
     << "adaptive_search_region = "
     << (cfg.ablation.adaptive_search_region ? "true" : "false") << "\n"
     << "fixed_k = " << fmt_double(cfg.ablation.fixed_k) << "\n";
  return os.str();
}

// --- scenario JSON -------------------------------------------------------------------

namespace {

CameraSpec camera_from_json(const json& j) {
  CameraSpec c;
  check_keys(j, "camera",
             {"kind", "pan_vx", "pan_vy", "shake_amplitude", "shake_period",
              "shake_rot_amplitude", "rot_center_x", "rot_center_y"});
  const std::string kind = get_string(j, "kind", "camera", "none");
  if (kind == "none") {
    c.kind = CameraSpec::Kind::none;
  } else if (kind == "pan") {
    c.kind = CameraSpec::Kind::pan;
  } else if (kind == "shake") {
    c.kind = CameraSpec::Kind::shake;
  } else if (kind == "composite") {
    c.kind = CameraSpec::Kind::composite;
  } else {
    fail_field("camera.kind", "must be none|pan|shake|composite");
  }
  c.pan_vx = get_double(j, "pan_vx", "camera", c.pan_vx);
  c.pan_vy = get_double(j, "pan_vy", "camera", c.pan_vy);
  c.shake_amplitude = get_double(j, "shake_amplitude", "camera",
                                 c.shake_amplitude);
  c.shake_period = get_double(j, "shake_period", "camera", c.shake_period);
  c.shake_rot_amplitude =
      get_double(j, "shake_rot_amplitude", "camera", c.shake_rot_amplitude);
  c.rot_center_x = get_double(j, "rot_center_x", "camera", c.rot_center_x);
  c.rot_center_y = get_double(j, "rot_center_y", "camera", c.rot_center_y);
  return c;
}

json camera_to_json(const CameraSpec& c) {
  const char* kind = "none";
  switch (c.kind) {
    case CameraSpec::Kind::none: kind = "none"; break;
    case CameraSpec::Kind::pan: kind = "pan"; break;
    case CameraSpec::Kind::shake: kind = "shake"; break;
    case CameraSpec::Kind::composite: kind = "composite"; break;
  }
  return {{"kind", kind},
          {"pan_vx", c.pan_vx},
          {"pan_vy", c.pan_vy},
          {"shake_amplitude", c.shake_amplitude},
          {"shake_period", c.shake_period},
          {"shake_rot_amplitude", c.shake_rot_amplitude},
          {"rot_center_x", c.rot_center_x},
          {"rot_center_y", c.rot_center_y}};
}

ObjectSpec object_from_json(const json& j) {
  ObjectSpec o;
  check_keys(j, "object",
             {"kind", "x0", "y0", "w", "h", "vx", "vy", "segments", "ax",
              "ay"});
  const std::string kind = get_string(j, "kind", "object", "fixed");
  if (kind == "fixed") {
    o.kind = ObjectSpec::Kind::fixed;
  } else if (kind == "constant_velocity") {
    o.kind = ObjectSpec::Kind::constant_velocity;
  } else if (kind == "piecewise") {
    o.kind = ObjectSpec::Kind::piecewise;
  } else if (kind == "accelerating") {
    o.kind = ObjectSpec::Kind::accelerating;
  } else {
    fail_field("object.kind",
               "must be fixed|constant_velocity|piecewise|accelerating");
  }
  o.x0 = get_double(j, "x0", "object", o.x0);
  o.y0 = get_double(j, "y0", "object", o.y0);
  o.w = get_double(j, "w", "object", o.w);
  o.h = get_double(j, "h", "object", o.h);
  o.vx = get_double(j, "vx", "object", o.vx);
  o.vy = get_double(j, "vy", "object", o.vy);
  o.ax = get_double(j, "ax", "object", o.ax);
  o.ay = get_double(j, "ay", "object", o.ay);
  if (const json* segs = find(j, "segments")) {
    if (!segs->is_array()) fail_field("object.segments", "expected an array");
    int idx = 0;
    for (const json& s : *segs) {
      const std::string path = "object.segments[" + std::to_string(idx) + "]";
      if (!s.is_object()) fail_field(path, "expected an object");
      check_keys(s, path, {"start", "vx", "vy"});
      VelocitySegment seg;
      seg.start_frame = static_cast<int>(get_int(s, "start", path, 0));
      seg.vx = get_double(s, "vx", path, 0.0);
      seg.vy = get_double(s, "vy", path, 0.0);
      o.segments.push_back(seg);
      ++idx;
    }
  }
  return o;
}

json object_to_json(const ObjectSpec& o) {
  const char* kind = "fixed";
  switch (o.kind) {
    case ObjectSpec::Kind::fixed: kind = "fixed"; break;
    case ObjectSpec::Kind::constant_velocity: kind = "constant_velocity"; break;
    case ObjectSpec::Kind::piecewise: kind = "piecewise"; break;
    case ObjectSpec::Kind::accelerating: kind = "accelerating"; break;
  }
  json segs = json::array();
  for (const VelocitySegment& s : o.segments) {
    segs.push_back({{"start", s.start_frame}, {"vx", s.vx}, {"vy", s.vy}});
  }
  return {{"kind", kind},
          {"x0", o.x0},
          {"y0", o.y0},
          {"w", o.w},
          {"h", o.h},
          {"vx", o.vx},
          {"vy", o.vy},
          {"ax", o.ax},
          {"ay", o.ay},
          {"segments", std::move(segs)}};
}

NoiseSpec noise_from_json(const json& j) {
  NoiseSpec n;
  check_keys(j, "detection_noise",
             {"sigma_pos", "sigma_size", "conf_low", "conf_high",
              "glitch_fraction", "glitch_sigma_pos", "occlusion",
              "junk_sigma_pos", "junk_conf_low", "junk_conf_high"});
  n.sigma_pos = get_double(j, "sigma_pos", "detection_noise", n.sigma_pos);
  n.sigma_size = get_double(j, "sigma_size", "detection_noise", n.sigma_size);
  n.conf_low = get_double(j, "conf_low", "detection_noise", n.conf_low);
  n.conf_high = get_double(j, "conf_high", "detection_noise", n.conf_high);
  n.glitch_fraction =
      get_double(j, "glitch_fraction", "detection_noise", n.glitch_fraction);
  n.glitch_sigma_pos = get_double(j, "glitch_sigma_pos", "detection_noise",
                                  n.glitch_sigma_pos);
  const std::string occ = get_string(j, "occlusion", "detection_noise",
                                     "drop");
  if (occ == "drop") {
    n.occlusion = NoiseSpec::OcclusionPolicy::drop;
  } else if (occ == "junk") {
    n.occlusion = NoiseSpec::OcclusionPolicy::junk;
  } else {
    fail_field("detection_noise.occlusion", "must be drop|junk");
  }
  n.junk_sigma_pos =
      get_double(j, "junk_sigma_pos", "detection_noise", n.junk_sigma_pos);
  n.junk_conf_low =
      get_double(j, "junk_conf_low", "detection_noise", n.junk_conf_low);
  n.junk_conf_high =
      get_double(j, "junk_conf_high", "detection_noise", n.junk_conf_high);
  return n;
}

json noise_to_json(const NoiseSpec& n) {
  return {{"sigma_pos", n.sigma_pos},
          {"sigma_size", n.sigma_size},
          {"conf_low", n.conf_low},
          {"conf_high", n.conf_high},
          {"glitch_fraction", n.glitch_fraction},
          {"glitch_sigma_pos", n.glitch_sigma_pos},
          {"occlusion",
           n.occlusion == NoiseSpec::OcclusionPolicy::drop ? "drop" : "junk"},
          {"junk_sigma_pos", n.junk_sigma_pos},
          {"junk_conf_low", n.junk_conf_low},
          {"junk_conf_high", n.junk_conf_high}};
}

}  // namespace

ScenarioSpec scenario_from_json(const std::string& text) {
  const json j = parse_json(text, "scenario");
  if (!j.is_object()) throw ValidationError("scenario: expected a JSON object");
  check_keys(j, "",
             {"length", "seed", "ref_interval", "camera", "object",
              "occlusions", "correspondences", "detection_noise"});
  ScenarioSpec spec;
  spec.length = static_cast<int>(get_int(j, "length", "", spec.length));
  spec.seed = static_cast<std::uint64_t>(
      get_int(j, "seed", "", static_cast<std::int64_t>(spec.seed)));
  spec.ref_interval =
      static_cast<int>(get_int(j, "ref_interval", "", spec.ref_interval));
  if (const json* c = find(j, "camera")) {
    if (!c->is_object()) fail_field("camera", "expected an object");
    spec.camera = camera_from_json(*c);
  }
  if (const json* o = find(j, "object")) {
    if (!o->is_object()) fail_field("object", "expected an object");
    spec.object = object_from_json(*o);
  }
  if (const json* occs = find(j, "occlusions")) {
    if (!occs->is_array()) fail_field("occlusions", "expected an array");
    int idx = 0;
    for (const json& w : *occs) {
      const std::string path = "occlusions[" + std::to_string(idx) + "]";
      if (!w.is_object()) fail_field(path, "expected an object");
      check_keys(w, path, {"start", "end"});
      OcclusionWindow window;
      window.start = static_cast<int>(get_int(w, "start", path, 0));
      window.end = static_cast<int>(get_int(w, "end", path, 0));
      spec.occlusions.push_back(window);
      ++idx;
    }
  }
  if (const json* c = find(j, "correspondences")) {
    if (!c->is_object()) fail_field("correspondences", "expected an object");
    check_keys(*c, "correspondences",
               {"count", "noise_sigma", "outlier_fraction"});
    spec.correspondence.count = static_cast<int>(
        get_int(*c, "count", "correspondences", spec.correspondence.count));
    spec.correspondence.noise_sigma =
        get_double(*c, "noise_sigma", "correspondences",
                   spec.correspondence.noise_sigma);
    spec.correspondence.outlier_fraction =
        get_double(*c, "outlier_fraction", "correspondences",
                   spec.correspondence.outlier_fraction);
  }
  if (const json* n = find(j, "detection_noise")) {
    if (!n->is_object()) fail_field("detection_noise", "expected an object");
    spec.detection_noise = noise_from_json(*n);
  }
  spec.validate();
  return spec;
}

ScenarioSpec load_scenario(const std::string& path) {
  try {
    return scenario_from_json(read_text_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string scenario_to_json(const ScenarioSpec& spec) {
  json occs = json::array();
  for (const OcclusionWindow& w : spec.occlusions) {
    occs.push_back({{"start", w.start}, {"end", w.end}});
  }
  const json j = {{"length", spec.length},
                  {"seed", spec.seed},
                  {"ref_interval", spec.ref_interval},
                  {"camera", camera_to_json(spec.camera)},
                  {"object", object_to_json(spec.object)},
                  {"occlusions", std::move(occs)},
                  {"correspondences",
                   {{"count", spec.correspondence.count},
                    {"noise_sigma", spec.correspondence.noise_sigma},
                    {"outlier_fraction",
                     spec.correspondence.outlier_fraction}}},
                  {"detection_noise", noise_to_json(spec.detection_noise)}};
  return j.dump(2) + "\n";
}

void save_scenario(const std::string& path, const ScenarioSpec& spec) {
  write_text_file(path, scenario_to_json(spec));
}

// --- run manifest ----------------------------------------------------------------------

RunManifest manifest_from_json(const std::string& text) {
  const json j = parse_json(text, "manifest");
  if (!j.is_object()) throw ValidationError("manifest: expected a JSON object");
  check_keys(j, "",
             {"config", "scenario", "replay", "out_dir", "seed", "ablation"});
  RunManifest m;
  m.config_path = get_string(j, "config", "", "");
  m.scenario_path = get_string(j, "scenario", "", "");
  if (const json* r = find(j, "replay")) {
    if (!r->is_object()) fail_field("replay", "expected an object");
    check_keys(*r, "replay", {"correspondences", "detections", "ground_truth"});
    m.correspondence_path = get_string(*r, "correspondences", "replay", "");
    m.detection_path = get_string(*r, "detections", "replay", "");
    m.ground_truth_path = get_string(*r, "ground_truth", "replay", "");
    if (m.correspondence_path.empty()) {
      fail_field("replay.correspondences", "required");
    }
  }
  const bool has_scenario = !m.scenario_path.empty();
  const bool has_replay = !m.correspondence_path.empty();
  if (has_scenario == has_replay) {
    throw ValidationError(
        "manifest: exactly one input source required (scenario or replay)");
  }
  m.out_dir = get_string(j, "out_dir", "", "");
  m.seed = static_cast<std::uint64_t>(get_int(j, "seed", "", 1));
  if (const json* a = find(j, "ablation")) {
    if (!a->is_object()) fail_field("ablation", "expected an object");
    check_keys(*a, "ablation",
               {"motion_decouple", "motion_prediction",
                "adaptive_search_region", "fixed_k"});
    m.ablation.motion_decouple = get_bool(*a, "motion_decouple", "ablation",
                                          m.ablation.motion_decouple);
    m.ablation.motion_prediction = get_bool(
        *a, "motion_prediction", "ablation", m.ablation.motion_prediction);
    m.ablation.adaptive_search_region =
        get_bool(*a, "adaptive_search_region", "ablation",
                 m.ablation.adaptive_search_region);
    m.ablation.fixed_k = get_double(*a, "fixed_k", "ablation",
                                    m.ablation.fixed_k);
  }
  return m;
}

RunManifest load_manifest(const std::string& path) {
  RunManifest m;
  try {
    m = manifest_from_json(read_text_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  const std::filesystem::path base =
      std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (p.empty()) return;
    std::filesystem::path fp(p);
    if (fp.is_relative()) p = (base / fp).string();
  };
  resolve(m.config_path);
  resolve(m.scenario_path);
  resolve(m.correspondence_path);
  resolve(m.detection_path);
  resolve(m.ground_truth_path);
  resolve(m.out_dir);
  return m;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  if (!m.config_path.empty()) j["config"] = m.config_path;
  if (!m.scenario_path.empty()) {
    j["scenario"] = m.scenario_path;
  } else {
    json replay;
    replay["correspondences"] = m.correspondence_path;
    if (!m.detection_path.empty()) replay["detections"] = m.detection_path;
    if (!m.ground_truth_path.empty()) {
      replay["ground_truth"] = m.ground_truth_path;
    }
    j["replay"] = std::move(replay);
  }
  if (!m.out_dir.empty()) j["out_dir"] = m.out_dir;
  j["seed"] = m.seed;
  j["ablation"] = {
      {"motion_decouple", m.ablation.motion_decouple},
      {"motion_prediction", m.ablation.motion_prediction},
      {"adaptive_search_region", m.ablation.adaptive_search_region},
      {"fixed_k", m.ablation.fixed_k}};
  return j.dump(2) + "\n";
}

void save_manifest(const std::string& path, const RunManifest& m) {
  write_text_file(path, manifest_to_json(m));
}

// --- whole files ------------------------------------------------------------------------

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace mptrack
