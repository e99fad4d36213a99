// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/service.hpp>

#include <cstdint>
#include <memory>
#include <string>

namespace companion
{

/// REST + WebSocket front end of a SessionService.
///
///   POST /sessions                      {library_mode?, seed?}
///   GET  /sessions
///   GET  /sessions/{id}
///   POST /sessions/{id}/strokes         {strokes: [[[x, y], ...]], idempotency_key?}
///   POST /sessions/{id}/message         {text, attach_image?}
///   POST /sessions/{id}/signal          {kind, photo_png_base64?, corners?}
///   GET  /sessions/{id}/svg?revision=N
///   GET  /sessions/{id}/pen-program
///   GET  /sessions/{id}/events?since=N  (buffered events as JSON)
///   WS   /sessions/{id}/events?since=N  (live JSON events)
///
/// Errors are {"code", "message", "detail"?} with 404 for an unknown session,
/// 409 for TurnInProgress, 502 for BackendError, 504 for Timeout and 400 for
/// bad input.
class HttpServer
{
  public:
    /// Binds immediately; port 0 picks a free port.
    HttpServer(SessionService& service, const std::string& address, std::uint16_t port, int threads = 4);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    [[nodiscard]] std::uint16_t port() const noexcept;
    void start();
    /// Blocks until stop() is called from another thread or a signal handler.
    void wait();
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> _impl;
};

/// HTTP status for a library error code.
int http_status_for(ErrorCode code);

} // namespace companion
