#pragma once

// MOT-Challenge style text files: det / gt / result CSVs, seqinfo.ini, and the optional
// per-detection appearance descriptor file.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "acmot/optimizer.hpp"
#include "acmot/types.hpp"

namespace acmot {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LabeledBox {
    BBox bbox;
    double confidence = 1.0;
    bool evaluable = true;
};

/// Boxes keyed by track id, then frame. Used for ground truth and for tracker output.
struct LabeledTracks {
    std::map<int, std::map<FrameIndex, LabeledBox>> tracks;

    bool empty() const { return tracks.empty(); }
    FrameIndex last_frame() const {
        FrameIndex last = 0;
        for (const auto& [id, boxes] : tracks)
            if (!boxes.empty()) last = std::max(last, boxes.rbegin()->first);
        return last;
    }
};

struct DetFile {
    DetectionsByFrame detections;
    int rejected = 0;  // lines dropped for non-positive width/height
};

struct SequenceMeta {
    std::string name;
    double frame_rate = 0.0;
    int seq_length = 0;
    int im_width = 0;
    int im_height = 0;

    int default_window_length() const { return window_for_frame_rate(frame_rate, 1.0); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline ParseError line_error(const std::string& source, int line_no, const std::string& what) {
    return ParseError(source + ":" + std::to_string(line_no) + ": " + what);
}

inline double parse_double(std::string_view field, const std::string& source, int line_no) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
        throw line_error(source, line_no, "bad number '" + std::string(field) + "'");
    return v;
}

inline int parse_int(std::string_view field, const std::string& source, int line_no) {
    const double v = parse_double(field, source, line_no);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw line_error(source, line_no, "expected an integer, got '" + std::string(field) + "'");
    return static_cast<int>(v);
}

struct MotRow {
    FrameIndex frame;
    int id;
    BBox bbox;
    double confidence;
};

// Calls fn(row, line_no) for every non-blank line of the 10-field grammar.
template <typename Fn>
void for_each_mot_row(std::istream& in, const std::string& source, Fn&& fn) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        const auto fields = split_csv(body);
        if (fields.size() != 10)
            throw line_error(source, line_no, "expected 10 fields, got " + std::to_string(fields.size()));
        MotRow row{parse_int(fields[0], source, line_no), parse_int(fields[1], source, line_no),
                   {parse_double(fields[2], source, line_no), parse_double(fields[3], source, line_no),
                    parse_double(fields[4], source, line_no), parse_double(fields[5], source, line_no)},
                   parse_double(fields[6], source, line_no)};
        for (int k = 7; k < 10; ++k) parse_double(fields[static_cast<std::size_t>(k)], source, line_no);
        if (row.frame < 1) throw line_error(source, line_no, "frame index must be >= 1");
        fn(row, line_no);
    }
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return in;
}

// Shortest text that parses back to exactly `v`.
inline std::string format_exact(double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string format_fixed2(double v) {
    double r = std::round(v * 100.0) / 100.0;
    if (r == 0.0) r = 0.0;
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r, std::chars_format::fixed, 2);
    return std::string(buf, ptr);
}

}  // namespace detail

// ---- detections ------------------------------------------------------------------------

inline DetFile parse_det(std::istream& in, const std::string& source = "<det>") {
    DetFile out;
    detail::for_each_mot_row(in, source, [&](const detail::MotRow& row, int) {
        if (!(row.bbox.width > 0.0 && row.bbox.height > 0.0)) {
            ++out.rejected;
            return;
        }
        Observation obs;
        obs.frame = row.frame;
        obs.bbox = row.bbox;
        obs.confidence = row.confidence;
        out.detections[row.frame].push_back(std::move(obs));
    });
    return out;
}

inline DetFile parse_det_file(const std::string& path) {
    auto in = detail::open_input(path);
    return parse_det(in, path);
}

// ---- ground truth / results -------------------------------------------------------------

inline LabeledTracks parse_gt(std::istream& in, const std::string& source = "<gt>") {
    LabeledTracks out;
    detail::for_each_mot_row(in, source, [&](const detail::MotRow& row, int line_no) {
        if (row.id < 1) throw detail::line_error(source, line_no, "track id must be >= 1");
        if (!(row.bbox.width > 0.0 && row.bbox.height > 0.0))
            throw detail::line_error(source, line_no, "non-positive box size");
        auto& boxes = out.tracks[row.id];
        if (boxes.contains(row.frame))
            throw detail::line_error(source, line_no,
                                     "duplicate box for track " + std::to_string(row.id) + " in frame " + std::to_string(row.frame));
        boxes[row.frame] = {row.bbox, row.confidence, row.confidence != 0.0};
    });
    return out;
}

inline LabeledTracks parse_gt_file(const std::string& path) {
    auto in = detail::open_input(path);
    return parse_gt(in, path);
}

/// Tracker output as id -> frame -> box (interpolated entries included).
inline LabeledTracks to_labeled(const TrackSet& set) {
    LabeledTracks out;
    for (const auto& t : set.tracks)
        for (const auto& e : t.entries) out.tracks[t.id][e.frame] = {e.bbox, 1.0, true};
    return out;
}

namespace detail {

inline void write_rows(std::ostream& out, const LabeledTracks& tracks, bool exact) {
    struct Row {
        FrameIndex frame;
        int id;
        const LabeledBox* box;
    };
    std::vector<Row> rows;
    for (const auto& [id, boxes] : tracks.tracks)
        for (const auto& [frame, box] : boxes) rows.push_back({frame, id, &box});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
    });
    auto fmt = exact ? format_exact : format_fixed2;
    for (const auto& r : rows) {
        const BBox& b = r.box->bbox;
        out << r.frame << ',' << r.id << ',' << fmt(b.left) << ',' << fmt(b.top) << ',' << fmt(b.width) << ','
            << fmt(b.height) << ',' << (exact ? format_exact(r.box->confidence) : std::string("1")) << ",-1,-1,-1\n";
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace detail

/// "frame,id,left,top,width,height,1,-1,-1,-1", sorted by (frame, id), 2 decimals.
inline std::string format_results(const TrackSet& set) {
    std::ostringstream out;
    detail::write_rows(out, to_labeled(set), false);
    return out.str();
}

inline void write_result_file(const TrackSet& set, const std::string& path) {
    detail::write_text_file(path, format_results(set));
}

/// Ground truth with shortest round-trip number formatting (confidence column kept).
inline std::string format_gt(const LabeledTracks& gt) {
    std::ostringstream out;
    detail::write_rows(out, gt, true);
    return out.str();
}

inline void write_gt_file(const LabeledTracks& gt, const std::string& path) {
    detail::write_text_file(path, format_gt(gt));
}

inline std::string format_det(const DetectionsByFrame& dets) {
    std::ostringstream out;
    for (const auto& [frame, list] : dets) {
        for (const auto& d : list) {
            const BBox& b = d.bbox;
            out << frame << ",-1," << detail::format_exact(b.left) << ',' << detail::format_exact(b.top) << ','
                << detail::format_exact(b.width) << ',' << detail::format_exact(b.height) << ','
                << detail::format_exact(d.confidence) << ",-1,-1,-1\n";
        }
    }
    return out.str();
}

inline void write_det_file(const DetectionsByFrame& dets, const std::string& path) {
    detail::write_text_file(path, format_det(dets));
}

// ---- appearance descriptors ----------------------------------------------------------------

/// "frame,det_index,v1,...,vK"; det_index counts the accepted detections of that frame
/// from 0 in file order.
using AppearanceTable = std::map<std::pair<FrameIndex, int>, std::vector<double>>;

inline AppearanceTable parse_appearance(std::istream& in, const std::string& source = "<appearance>") {
    AppearanceTable out;
    std::string line;
    int line_no = 0;
    std::size_t bins = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = detail::trim(line);
        if (body.empty()) continue;
        const auto fields = detail::split_csv(body);
        if (fields.size() < 3) throw detail::line_error(source, line_no, "expected frame,det_index,v1,...");
        if (bins == 0) bins = fields.size() - 2;
        if (fields.size() - 2 != bins) throw detail::line_error(source, line_no, "descriptor length differs from first line");
        const FrameIndex frame = detail::parse_int(fields[0], source, line_no);
        const int index = detail::parse_int(fields[1], source, line_no);
        if (frame < 1 || index < 0) throw detail::line_error(source, line_no, "bad frame or det_index");
        std::vector<double> h;
        h.reserve(bins);
        for (std::size_t k = 2; k < fields.size(); ++k) h.push_back(detail::parse_double(fields[k], source, line_no));
        try {
            require_normalized(h, "descriptor");
        } catch (const PreconditionError& e) {
            throw detail::line_error(source, line_no, e.what());
        }
        if (!out.emplace(std::make_pair(frame, index), std::move(h)).second)
            throw detail::line_error(source, line_no, "duplicate (frame, det_index)");
    }
    return out;
}

inline AppearanceTable parse_appearance_file(const std::string& path) {
    auto in = detail::open_input(path);
    return parse_appearance(in, path);
}

/// Attaches descriptors to detections; every detection must have one.
inline void attach_appearance(DetectionsByFrame& dets, const AppearanceTable& table) {
    std::size_t used = 0;
    for (auto& [frame, list] : dets) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            auto it = table.find({frame, static_cast<int>(i)});
            if (it == table.end())
                throw ParseError("appearance: no descriptor for frame " + std::to_string(frame) + " det " + std::to_string(i));
            list[i].appearance = it->second;
            ++used;
        }
    }
    if (used != table.size()) throw ParseError("appearance: descriptors without a matching detection");
}

inline std::string format_appearance(const DetectionsByFrame& dets) {
    std::ostringstream out;
    for (const auto& [frame, list] : dets) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            out << frame << ',' << i;
            for (double v : list[i].appearance) out << ',' << detail::format_exact(v);
            out << '\n';
        }
    }
    return out.str();
}

// ---- seqinfo --------------------------------------------------------------------------------

inline SequenceMeta parse_seqinfo(std::istream& in, const std::string& source = "<seqinfo>") {
    std::map<std::string, std::string, std::less<>> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = detail::trim(line);
        if (body.empty() || body.front() == '[' || body.front() == '#' || body.front() == ';') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw detail::line_error(source, line_no, "expected key=value");
        kv[std::string(detail::trim(body.substr(0, eq)))] = std::string(detail::trim(body.substr(eq + 1)));
    }
    auto get = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError(source + ": missing key " + key);
        return it->second;
    };
    auto number = [&](const char* key) {
        const std::string& v = get(key);
        double d = 0.0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
        if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError(source + ": bad value for " + key);
        return d;
    };
    SequenceMeta m;
    m.name = get("name");
    m.frame_rate = number("frameRate");
    m.seq_length = static_cast<int>(number("seqLength"));
    m.im_width = static_cast<int>(number("imWidth"));
    m.im_height = static_cast<int>(number("imHeight"));
    if (!(m.frame_rate > 0.0)) throw ParseError(source + ": frameRate must be > 0");
    if (m.seq_length < 1) throw ParseError(source + ": seqLength must be >= 1");
    return m;
}

inline SequenceMeta read_seqinfo(const std::string& path) {
    auto in = detail::open_input(path);
    return parse_seqinfo(in, path);
}

}  // namespace acmot
