#include "bfstats/ingest/archive.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include <boost/iostreams/copy.hpp>
#include <boost/iostreams/device/array.hpp>
#include <boost/iostreams/device/back_inserter.hpp>
#include <boost/iostreams/device/file.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/counter.hpp>
#include <boost/iostreams/filtering_stream.hpp>

namespace bfstats::ingest {

namespace fs = std::filesystem;
namespace io = boost::iostreams;

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Compressed-side byte counter sits between the decompressor and the device.
void push_bz2_source(io::filtering_istream& in, const std::string* bytes, const fs::path* path) {
  in.push(io::bzip2_decompressor());
  in.push(io::counter());
  if (bytes)
    in.push(io::array_source(bytes->data(), bytes->size()));
  else
    in.push(io::file_source(path->string(), std::ios::in | std::ios::binary));
}

std::uint64_t compressed_offset(io::filtering_istream& in) {
  const auto* c = in.component<io::counter>(1);
  return c ? static_cast<std::uint64_t>(c->characters()) : 0;
}

std::string market_id_from_filename(const fs::path& p) {
  std::string name = p.filename().string();
  if (ends_with(name, ".bz2")) name.resize(name.size() - 4);
  return name;
}

std::string event_id_from_parent(const fs::path& p) {
  return p.has_parent_path() ? p.parent_path().filename().string() : std::string();
}

// Minimal ustar reader: regular files only, GNU long names and pax path
// records honored, everything else skipped.
class TarReader {
 public:
  TarReader(std::istream& in, std::string name, io::filtering_istream* counted)
      : in_(in), name_(std::move(name)), counted_(counted) {}

  // Returns false at end of archive.
  bool next(std::string& path, std::string& data) {
    std::string long_name;
    for (;;) {
      char header[512];
      if (!read_block(header, /*allow_eof=*/true)) return false;
      if (std::all_of(header, header + 512, [](char c) { return c == 0; })) return false;

      const std::uint64_t size = octal(header + 124, 12);
      const char type = header[156];
      std::string body = read_body(size);

      if (type == 'L') {
        long_name.assign(body.c_str());
        continue;
      }
      if (type == 'x') {
        auto p = pax_path(body);
        if (!p.empty()) long_name = p;
        continue;
      }
      if (type != '0' && type != '\0') {
        long_name.clear();
        continue;
      }
      if (!long_name.empty()) {
        path = long_name;
      } else {
        std::string prefix(header + 345, strnlen(header + 345, 155));
        std::string base(header, strnlen(header, 100));
        path = prefix.empty() ? base : prefix + "/" + base;
      }
      data = std::move(body);
      return true;
    }
  }

 private:
  bool read_block(char* buf, bool allow_eof) {
    in_.read(buf, 512);
    if (in_.gcount() == 512) return true;
    if (in_.bad() || in_.gcount() != 0 || !allow_eof) fail("truncated tar stream");
    return false;
  }

  std::string read_body(std::uint64_t size) {
    std::string body(size, '\0');
    if (size) {
      in_.read(body.data(), static_cast<std::streamsize>(size));
      if (static_cast<std::uint64_t>(in_.gcount()) != size) fail("truncated tar member");
    }
    const std::uint64_t pad = (512 - size % 512) % 512;
    char scratch[512];
    if (pad) {
      in_.read(scratch, static_cast<std::streamsize>(pad));
      if (static_cast<std::uint64_t>(in_.gcount()) != pad) fail("truncated tar padding");
    }
    return body;
  }

  static std::uint64_t octal(const char* field, std::size_t len) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < len && field[i]; ++i) {
      if (field[i] == ' ') continue;
      if (field[i] < '0' || field[i] > '7') break;
      v = v * 8 + static_cast<std::uint64_t>(field[i] - '0');
    }
    return v;
  }

  static std::string pax_path(const std::string& body) {
    std::istringstream ss(body);
    std::string rec;
    while (std::getline(ss, rec)) {
      auto sp = rec.find(' ');
      if (sp == std::string::npos) continue;
      auto kv = rec.substr(sp + 1);
      if (kv.rfind("path=", 0) == 0) return kv.substr(5);
    }
    return {};
  }

  [[noreturn]] void fail(const std::string& what) {
    throw DecodeError(name_, counted_ ? compressed_offset(*counted_) : 0, what);
  }

  std::istream& in_;
  std::string name_;
  io::filtering_istream* counted_;
};

void add_tar_members(std::istream& in, const std::string& name, io::filtering_istream* counted,
                     std::vector<MarketSource>& out) {
  TarReader tar(in, name, counted);
  std::string member, data;
  while (tar.next(member, data)) {
    if (!ends_with(member, ".bz2")) continue;
    fs::path p(member);
    out.push_back(MarketSource::from_bytes(name + ":" + member, event_id_from_parent(p),
                                           market_id_from_filename(p), std::move(data)));
  }
  if (counted && counted->bad())
    throw DecodeError(name, compressed_offset(*counted), "corrupt or truncated bzip2 stream");
}

}  // namespace

struct LineStream::Impl {
  std::shared_ptr<const std::string> bytes;  // keeps the array source alive
  fs::path path;
  io::filtering_istream in;
};

LineStream::LineStream(std::string name, std::unique_ptr<Impl> impl)
    : name_(std::move(name)), impl_(std::move(impl)) {}
LineStream::LineStream(LineStream&&) noexcept = default;
LineStream& LineStream::operator=(LineStream&&) noexcept = default;
LineStream::~LineStream() = default;

bool LineStream::next(std::string& line) {
  auto& in = impl_->in;
  if (!std::getline(in, line)) {
    if (in.bad()) throw DecodeError(name_, compressed_offset(in), "corrupt or truncated bzip2 stream");
    return false;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ++line_no_;
  return true;
}

MarketSource MarketSource::from_file(const fs::path& path) {
  MarketSource s;
  s.name_ = path.string();
  s.event_id_ = event_id_from_parent(path);
  s.market_id_ = market_id_from_filename(path);
  s.path_ = path;
  return s;
}

MarketSource MarketSource::from_bytes(std::string name, std::string event_id, std::string market_id,
                                      std::string compressed) {
  MarketSource s;
  s.name_ = std::move(name);
  s.event_id_ = std::move(event_id);
  s.market_id_ = std::move(market_id);
  s.bytes_ = std::make_shared<const std::string>(std::move(compressed));
  return s;
}

LineStream MarketSource::lines() const {
  auto impl = std::make_unique<LineStream::Impl>();
  impl->bytes = bytes_;
  impl->path = path_;
  if (!bytes_ && !fs::exists(path_)) throw std::runtime_error(name_ + ": no such file");
  push_bz2_source(impl->in, impl->bytes.get(), bytes_ ? nullptr : &impl->path);
  return LineStream(name_, std::move(impl));
}

std::vector<MarketSource> open_archive(const fs::path& path) {
  if (!fs::exists(path)) throw std::runtime_error(path.string() + ": no such file or directory");
  std::vector<MarketSource> out;

  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file() && ends_with(entry.path().filename().string(), ".bz2") &&
          !ends_with(entry.path().filename().string(), ".tar.bz2"))
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back(MarketSource::from_file(f));
    return out;
  }

  const std::string name = path.string();
  if (ends_with(name, ".tar.bz2") || ends_with(name, ".tbz2")) {
    io::filtering_istream in;
    push_bz2_source(in, nullptr, &path);
    add_tar_members(in, name, &in, out);
  } else if (ends_with(name, ".tar")) {
    std::ifstream in(path, std::ios::binary);
    add_tar_members(in, name, nullptr, out);
  } else {
    out.push_back(MarketSource::from_file(path));
  }
  std::sort(out.begin(), out.end(),
            [](const MarketSource& a, const MarketSource& b) { return a.name() < b.name(); });
  return out;
}

namespace {

bool ladder_in_bounds(const std::optional<PriceLadder>& ladder) {
  if (!ladder) return true;
  return std::all_of(ladder->begin(), ladder->end(), [](const PriceSize& l) {
    return l.price >= kMinOdds && l.price <= kMaxOdds && l.size >= 0.0;
  });
}

}  // namespace

MarketFile read_market_file(const MarketSource& source) {
  MarketFile file;
  file.name = source.name();
  file.event_id = source.event_id();
  file.market_id = source.market_id();

  auto lines = source.lines();
  std::string line;
  std::int64_t last_pt = 0;
  bool mismatch_reported = false;
  while (lines.next(line)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto msg = parse_message(line, lines.line_number(), &file.counters);
    const std::string where = file.name + ":" + std::to_string(lines.line_number());

    if (msg.pt < last_pt)
      file.diagnostics.warn("out_of_order_pt", where,
                            "pt " + std::to_string(msg.pt) + " precedes " + std::to_string(last_pt));
    last_pt = std::max(last_pt, msg.pt);

    for (const auto& mc : msg.mc) {
      if (!mismatch_reported && !file.market_id.empty() && mc.id != file.market_id) {
        file.diagnostics.warn("market_id_mismatch", where,
                              "message market " + mc.id + " differs from file name " + file.market_id);
        mismatch_reported = true;
      }
      if (!mc.market_definition && !mc.rc)
        file.diagnostics.warn("empty_market_change", where, "market change without definition or rc");
      if (!mc.rc) continue;
      for (const auto& rc : *mc.rc) {
        const bool ltp_ok = !rc.ltp || (*rc.ltp >= kMinOdds && *rc.ltp <= kMaxOdds);
        if (!ltp_ok || !ladder_in_bounds(rc.atb) || !ladder_in_bounds(rc.atl) || !ladder_in_bounds(rc.trd))
          file.diagnostics.warn("price_out_of_range", where,
                                "selection " + std::to_string(rc.id) + " has a price outside [1.01, 1000]");
      }
    }
    file.messages.push_back(std::move(msg));
  }
  return file;
}

std::string compress_bz2(const std::string& text) {
  std::string out;
  {
    io::filtering_ostream os;
    os.push(io::bzip2_compressor());
    os.push(io::back_inserter(out));
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
  }
  return out;
}

std::string decompress_bz2(const std::string& compressed, const std::string& name) {
  io::filtering_istream in;
  push_bz2_source(in, &compressed, nullptr);
  std::string out;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) out.append(buf, static_cast<std::size_t>(in.gcount()));
  if (in.bad()) throw DecodeError(name, compressed_offset(in), "corrupt or truncated bzip2 stream");
  return out;
}

}  // namespace bfstats::ingest
