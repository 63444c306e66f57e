#pragma once

// POSIX network front end for the engine. Requires Threads and OpenSSL
// (libcrypto: SHA-1 and base64 for the WebSocket handshake).

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyface/core/error.hpp"
#include "hyface/svc/engine.hpp"
#include "hyface/svc/export.hpp"
#include "hyface/svc/replay.hpp"

namespace hyface::svc {

struct ServerConfig {
  EngineConfig engine;
  std::string bind_address = "127.0.0.1";
  int command_port = 7070;  // 0 picks a free port
  int frame_port = 7071;    // HTTP + WebSocket; 0 picks a free port
  std::string static_dir;   // served under "/" when set
  std::size_t max_queued_frames = 8;  // per client; newer frames are dropped beyond this
  std::string export_dir;   // when set, each finished session is exported to <dir>/session-<tick>
  int socket_send_buffer = 0;  // SO_SNDBUF for accepted sockets; 0 keeps the system default
};

struct ServerStats {
  std::uint64_t ticks = 0;
  std::uint64_t frames_sent = 0;     // frames handed to sockets, summed over clients
  std::uint64_t frames_dropped = 0;  // backpressure drops, summed over clients
  std::uint64_t commands = 0;
};

namespace net {

inline std::string websocket_accept_key(const std::string& client_key) {
  const std::string magic = client_key + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(magic.data()), magic.size(), digest);
  unsigned char out[4 * ((SHA_DIGEST_LENGTH + 2) / 3) + 1];
  const int n = EVP_EncodeBlock(out, digest, SHA_DIGEST_LENGTH);
  return std::string(reinterpret_cast<char*>(out), static_cast<std::size_t>(n));
}

/// Server-to-client frame: FIN set, unmasked.
inline std::string websocket_frame(std::string_view payload, std::uint8_t opcode = 0x1) {
  std::string f;
  f.push_back(static_cast<char>(0x80 | opcode));
  const auto n = payload.size();
  if (n < 126) {
    f.push_back(static_cast<char>(n));
  } else if (n <= 0xffff) {
    f.push_back(126);
    f.push_back(static_cast<char>(n >> 8));
    f.push_back(static_cast<char>(n & 0xff));
  } else {
    f.push_back(127);
    for (int i = 7; i >= 0; --i) f.push_back(static_cast<char>((static_cast<std::uint64_t>(n) >> (8 * i)) & 0xff));
  }
  f.append(payload);
  return f;
}

struct WsMessage {
  std::uint8_t opcode = 0;
  std::string payload;
};

/// Extracts one complete frame from the front of `buf`. Returns nullopt when
/// more bytes are needed. Throws on frames this server does not accept
/// (unmasked client frames, fragmentation, oversized payloads).
inline std::optional<WsMessage> take_websocket_frame(std::string& buf, bool require_mask = true,
                                                     std::size_t max_payload = 1 << 20) {
  if (buf.size() < 2) return std::nullopt;
  const auto b0 = static_cast<std::uint8_t>(buf[0]), b1 = static_cast<std::uint8_t>(buf[1]);
  if (!(b0 & 0x80) || (b0 & 0x0f) == 0x0) throw IoError("websocket: fragmented messages are not supported");
  const bool masked = b1 & 0x80;
  if (require_mask && !masked) throw IoError("websocket: client frames must be masked");
  std::uint64_t len = b1 & 0x7f;
  std::size_t pos = 2;
  if (len == 126) {
    if (buf.size() < 4) return std::nullopt;
    len = (static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf[2])) << 8) | static_cast<std::uint8_t>(buf[3]);
    pos = 4;
  } else if (len == 127) {
    if (buf.size() < 10) return std::nullopt;
    len = 0;
    for (int i = 0; i < 8; ++i) len = (len << 8) | static_cast<std::uint8_t>(buf[2 + static_cast<std::size_t>(i)]);
    pos = 10;
  }
  if (len > max_payload) throw IoError("websocket: message too large");
  std::array<std::uint8_t, 4> mask{};
  if (masked) {
    if (buf.size() < pos + 4) return std::nullopt;
    for (std::size_t i = 0; i < 4; ++i) mask[i] = static_cast<std::uint8_t>(buf[pos + i]);
    pos += 4;
  }
  if (buf.size() < pos + len) return std::nullopt;
  WsMessage m{static_cast<std::uint8_t>(b0 & 0x0f), buf.substr(pos, static_cast<std::size_t>(len))};
  if (masked)
    for (std::size_t i = 0; i < m.payload.size(); ++i) m.payload[i] = static_cast<char>(m.payload[i] ^ mask[i % 4]);
  buf.erase(0, pos + static_cast<std::size_t>(len));
  return m;
}

struct HttpRequest {
  std::string method, target;
  std::map<std::string, std::string> headers;  // lower-cased names
};

inline std::optional<HttpRequest> parse_http_request(const std::string& head) {
  std::istringstream in(head);
  std::string line;
  HttpRequest r;
  if (!std::getline(in, line)) return std::nullopt;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream rl(line);
  std::string version;
  if (!(rl >> r.method >> r.target >> version) || version.rfind("HTTP/1.", 0) != 0) return std::nullopt;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;
    const auto colon = line.find(':');
    if (colon == std::string::npos) return std::nullopt;
    std::string name = line.substr(0, colon), value = line.substr(colon + 1);
    for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const auto b = value.find_first_not_of(" \t"), e = value.find_last_not_of(" \t");
    r.headers[name] = b == std::string::npos ? "" : value.substr(b, e - b + 1);
  }
  return r;
}

inline bool header_has_token(const HttpRequest& r, const std::string& name, const std::string& token) {
  const auto it = r.headers.find(name);
  if (it == r.headers.end()) return false;
  std::string v = it->second, t = token;
  for (auto& ch : v) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  std::size_t start = 0;
  while (start <= v.size()) {
    auto comma = v.find(',', start);
    if (comma == std::string::npos) comma = v.size();
    auto item = v.substr(start, comma - start);
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b != std::string::npos && item.substr(b, e - b + 1) == t) return true;
    start = comma + 1;
  }
  return false;
}

inline std::string http_response(int status, const std::string& reason, const std::string& type, const std::string& body) {
  return "HTTP/1.1 " + std::to_string(status) + " " + reason + "\r\nContent-Type: " + type +
         "\r\nContent-Length: " + std::to_string(body.size()) + "\r\nConnection: close\r\nCache-Control: no-store\r\n\r\n" +
         body;
}

inline std::string content_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

/// Maps a request target onto a file under `root`, refusing anything that
/// escapes it. Query strings are ignored; "/" maps to index.html.
inline std::optional<std::filesystem::path> resolve_static(const std::filesystem::path& root, std::string target) {
  namespace fs = std::filesystem;
  if (const auto q = target.find_first_of("?#"); q != std::string::npos) target.resize(q);
  if (target.empty() || target[0] != '/') return std::nullopt;
  if (target.find('%') != std::string::npos || target.find('\\') != std::string::npos) return std::nullopt;
  if (target == "/") target = "/index.html";
  const fs::path rel = fs::path(target.substr(1)).lexically_normal();
  if (rel.empty() || rel.is_absolute() || *rel.begin() == "..") return std::nullopt;
  std::error_code ec;
  const fs::path base = fs::weakly_canonical(root, ec);
  if (ec) return std::nullopt;
  const fs::path full = fs::weakly_canonical(base / rel, ec);
  if (ec) return std::nullopt;
  const auto [b, f] = std::mismatch(base.begin(), base.end(), full.begin(), full.end());
  if (b != base.end()) return std::nullopt;  // symlink pointing outside
  if (!fs::is_regular_file(full, ec)) return std::nullopt;
  return full;
}

inline int listen_on(const std::string& address, int port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, address.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw IoError("invalid bind address '" + address + "'");
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd, 16) < 0) {
    const std::string err = std::strerror(errno);
    ::close(fd);
    throw IoError("cannot listen on " + address + ":" + std::to_string(port) + ": " + err);
  }
  ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
  return fd;
}

inline int bound_port(int fd) {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

}  // namespace net

/// Runs the engine loop on its own thread at the configured tick rate.
/// All sockets are non-blocking and serviced by that same thread, so the
/// engine has exactly one writer; clients reach it only through the
/// engine's ordered command queue.
class Server {
 public:
  explicit Server(ServerConfig cfg) : cfg_(std::move(cfg)), engine_(cfg_.engine), recorder_(cfg_.engine) {}
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;
  ~Server() { stop(); }

  void start() {
    if (running_) return;
    command_fd_ = net::listen_on(cfg_.bind_address, cfg_.command_port);
    try {
      frame_fd_ = net::listen_on(cfg_.bind_address, cfg_.frame_port);
    } catch (...) {
      ::close(command_fd_);
      command_fd_ = -1;
      throw;
    }
    command_port_ = net::bound_port(command_fd_);
    frame_port_ = net::bound_port(frame_fd_);
    stop_requested_ = false;
    running_ = true;
    thread_ = std::thread([this] { loop(); });
  }

  void stop() {
    if (!running_) return;
    stop_requested_ = true;
    if (thread_.joinable()) thread_.join();
    running_ = false;
    for (auto& [fd, c] : clients_) ::close(fd);
    clients_.clear();
    if (command_fd_ >= 0) ::close(command_fd_);
    if (frame_fd_ >= 0) ::close(frame_fd_);
    command_fd_ = frame_fd_ = -1;
  }

  int command_port() const { return command_port_; }
  int frame_port() const { return frame_port_; }

  ServerStats stats() const {
    std::lock_guard lock(stats_mutex_);
    return stats_;
  }

  /// Replay log of everything applied so far. Safe to call after stop().
  ReplayLog replay_log() const {
    std::lock_guard lock(stats_mutex_);
    return recorder_.finish();
  }

 private:
  enum class Kind { command, http, websocket };

  struct Client {
    int fd = -1;
    int id = 0;
    Kind kind = Kind::command;
    std::string in;
    std::string out;                // replies and handshake bytes, never dropped
    std::deque<std::string> frames; // pending encoded frames, bounded
    bool close_after_write = false;
    bool dead = false;
  };

  void loop() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const auto period = std::chrono::nanoseconds(1'000'000'000LL / cfg_.engine.rate_hz);
    std::int64_t k = 0;
    while (!stop_requested_) {
      const auto deadline = t0 + period * k;
      const auto now = clock::now();
      if (now >= deadline) {
        do_tick();
        ++k;
        continue;
      }
      const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      poll_once(static_cast<int>(std::clamp<long long>(wait_ms, 0, 20)));
    }
    // Flush replies still pending, best effort.
    poll_once(0);
  }

  void poll_once(int timeout_ms) {
    std::vector<pollfd> fds;
    fds.push_back({command_fd_, POLLIN, 0});
    fds.push_back({frame_fd_, POLLIN, 0});
    for (auto& [fd, c] : clients_) {
      short ev = POLLIN;
      if (!c.out.empty() || !c.frames.empty()) ev |= POLLOUT;
      fds.push_back({fd, ev, 0});
    }
    if (::poll(fds.data(), fds.size(), timeout_ms) <= 0) return;
    if (fds[0].revents & POLLIN) accept_from(command_fd_, Kind::command);
    if (fds[1].revents & POLLIN) accept_from(frame_fd_, Kind::http);
    for (std::size_t i = 2; i < fds.size(); ++i) {
      auto it = clients_.find(fds[i].fd);
      if (it == clients_.end()) continue;
      Client& c = it->second;
      if (fds[i].revents & (POLLERR | POLLHUP | POLLNVAL)) c.dead = true;
      if (!c.dead && (fds[i].revents & POLLIN)) read_from(c);
      if (!c.dead && (fds[i].revents & POLLOUT)) write_to(c);
    }
    reap();
  }

  void accept_from(int listen_fd, Kind kind) {
    for (;;) {
      const int fd = ::accept4(listen_fd, nullptr, nullptr, SOCK_NONBLOCK | SOCK_CLOEXEC);
      if (fd < 0) return;
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      if (cfg_.socket_send_buffer > 0)
        ::setsockopt(fd, SOL_SOCKET, SO_SNDBUF, &cfg_.socket_send_buffer, sizeof cfg_.socket_send_buffer);
      Client c;
      c.fd = fd;
      c.id = ++next_client_id_;
      c.kind = kind;
      clients_.emplace(fd, std::move(c));
    }
  }

  void read_from(Client& c) {
    char buf[8192];
    for (;;) {
      const auto n = ::recv(c.fd, buf, sizeof buf, 0);
      if (n > 0) {
        c.in.append(buf, static_cast<std::size_t>(n));
        if (c.in.size() > (1u << 22)) {
          c.dead = true;
          return;
        }
        continue;
      }
      if (n == 0) c.dead = true;
      else if (errno != EAGAIN && errno != EWOULDBLOCK) c.dead = true;
      break;
    }
    try {
      switch (c.kind) {
        case Kind::command:
          for (auto nl = c.in.find('\n'); nl != std::string::npos; nl = c.in.find('\n')) {
            std::string line = c.in.substr(0, nl);
            c.in.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) handle_command_line(c, line);
          }
          break;
        case Kind::http:
          handle_http(c);
          break;
        case Kind::websocket:
          while (auto m = net::take_websocket_frame(c.in)) {
            if (m->opcode == 0x1) {
              handle_command_line(c, m->payload);
            } else if (m->opcode == 0x8) {
              c.out += net::websocket_frame(m->payload.substr(0, 2), 0x8);
              c.close_after_write = true;
              c.frames.clear();
            } else if (m->opcode == 0x9) {
              c.out += net::websocket_frame(m->payload, 0xA);
            }
          }
          break;
      }
    } catch (const std::exception&) {
      c.dead = true;
    }
  }

  void handle_command_line(Client& c, const std::string& line) {
    {
      std::lock_guard lock(stats_mutex_);
      stats_.commands++;
    }
    if (auto reply = engine_.submit_line(line, c.id)) send_reply(c, *reply);
  }

  void send_reply(Client& c, const Reply& r) {
    const std::string text = r.to_json().dump();
    if (c.kind == Kind::websocket)
      c.out += net::websocket_frame(text);
    else
      c.out += text + "\n";
  }

  void handle_http(Client& c) {
    const auto end = c.in.find("\r\n\r\n");
    if (end == std::string::npos) {
      if (c.in.size() > 16384) c.dead = true;
      return;
    }
    const auto req = net::parse_http_request(c.in.substr(0, end + 4));
    c.in.erase(0, end + 4);
    c.close_after_write = true;
    if (!req) {
      c.out += net::http_response(400, "Bad Request", "text/plain", "bad request\n");
      return;
    }
    if (req->method != "GET") {
      c.out += net::http_response(405, "Method Not Allowed", "text/plain", "GET only\n");
      return;
    }
    const std::string path = req->target.substr(0, req->target.find('?'));
    if (path == "/ws" || path == "/frames") {
      const auto key = req->headers.find("sec-websocket-key");
      if (!net::header_has_token(*req, "upgrade", "websocket") || !net::header_has_token(*req, "connection", "upgrade") ||
          key == req->headers.end()) {
        c.out += net::http_response(400, "Bad Request", "text/plain", "expected a WebSocket upgrade\n");
        return;
      }
      c.out += "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\nSec-WebSocket-Accept: " +
               net::websocket_accept_key(key->second) + "\r\n\r\n";
      c.kind = Kind::websocket;
      c.close_after_write = false;
      return;
    }
    if (path == "/api/session") {
      c.out += net::http_response(200, "OK", "application/json", session_summary().dump() + "\n");
      return;
    }
    if (!cfg_.static_dir.empty()) {
      if (const auto file = net::resolve_static(cfg_.static_dir, req->target)) {
        std::ifstream f(*file, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        c.out += net::http_response(200, "OK", net::content_type(*file), ss.str());
        return;
      }
    }
    c.out += net::http_response(404, "Not Found", "text/plain", "not found\n");
  }

  // What a reconnecting console needs to resynchronize. No labels before a
  // stimulus has been answered.
  nlohmann::json session_summary() const {
    nlohmann::json j{{"tick", engine_.tick()}, {"mode", std::string(vg::to_string(engine_.mode()))}};
    const auto& s = engine_.session();
    if (!s) {
      j["session"] = nullptr;
      return j;
    }
    nlohmann::json counts = nlohmann::json::array(), percent = nlohmann::json::array();
    for (std::size_t i = 0; i < kBasisCount; ++i) {
      counts.push_back(s->matrix.counts[i]);
      percent.push_back(s->matrix.row_percent(i));
    }
    j["session"] = {{"status", std::string(to_string(s->status))},
                    {"phase", std::string(to_string(s->phase))},
                    {"index", s->index},
                    {"total", s->schedule.size()},
                    {"awaiting_choice", engine_.awaiting_choice()},
                    {"choices", s->choices.size()},
                    {"confusion_counts", counts},
                    {"confusion_percent", percent}};
    return j;
  }

  void write_to(Client& c) {
    // Replies first, then frames one at a time so a frame is never split
    // across a drop decision.
    for (;;) {
      if (c.out.empty()) {
        if (c.frames.empty()) break;
        c.out = std::move(c.frames.front());
        c.frames.pop_front();
        std::lock_guard lock(stats_mutex_);
        stats_.frames_sent++;
      }
      const auto n = ::send(c.fd, c.out.data(), c.out.size(), MSG_NOSIGNAL);
      if (n > 0) {
        c.out.erase(0, static_cast<std::size_t>(n));
        continue;
      }
      if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) return;
      c.dead = true;
      return;
    }
    if (c.close_after_write) c.dead = true;
  }

  void do_tick() {
    const bool was_running = engine_.session_running();
    auto step = engine_.step();
    {
      std::lock_guard lock(stats_mutex_);
      recorder_.observe(engine_, step);
      stats_.ticks++;
    }
    for (const auto& r : step.replies) {
      for (auto& [fd, c] : clients_)
        if (c.id == r.client) send_reply(c, r);
    }
    const std::string encoded = net::websocket_frame(step.frame.text);
    std::uint64_t dropped = 0;
    for (auto& [fd, c] : clients_) {
      if (c.kind != Kind::websocket || c.close_after_write) continue;
      if (c.frames.size() >= cfg_.max_queued_frames) {
        ++dropped;
        continue;
      }
      c.frames.push_back(encoded);
    }
    if (dropped) {
      std::lock_guard lock(stats_mutex_);
      stats_.frames_dropped += dropped;
    }
    for (auto& [fd, c] : clients_)
      if (!c.dead && (!c.out.empty() || !c.frames.empty())) write_to(c);
    reap();
    if (was_running && !engine_.session_running() && !cfg_.export_dir.empty()) export_finished();
  }

  void export_finished() {
    const auto& s = engine_.session();
    const auto dir = std::filesystem::path(cfg_.export_dir) / ("session-" + std::to_string(s->start_tick));
    try {
      std::filesystem::create_directories(cfg_.export_dir);
      std::lock_guard lock(stats_mutex_);
      export_session(s, dir.string(), recorder_.finish());
    } catch (const std::exception&) {
      // Export failures must not stop the loop; the files are simply absent.
    }
  }

  void reap() {
    for (auto it = clients_.begin(); it != clients_.end();) {
      if (it->second.dead) {
        ::close(it->first);
        it = clients_.erase(it);
      } else {
        ++it;
      }
    }
  }

  ServerConfig cfg_;
  Engine engine_;
  Recorder recorder_;
  mutable std::mutex stats_mutex_;  // guards stats_ and recorder_ for readers on other threads
  ServerStats stats_;
  std::map<int, Client> clients_;
  int next_client_id_ = 0;
  int command_fd_ = -1, frame_fd_ = -1;
  int command_port_ = 0, frame_port_ = 0;
  std::atomic<bool> stop_requested_{false};
  bool running_ = false;
  std::thread thread_;
};

}  // namespace hyface::svc
