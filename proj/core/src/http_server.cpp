// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>
#include <companion/http_server.hpp>
#include <companion/image.hpp>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>

#include <condition_variable>
#include <deque>
#include <thread>

namespace companion
{

namespace
{

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using json = nlohmann::json;

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

constexpr std::uint64_t kBodyLimit = 64ull * 1024 * 1024;

struct Target
{
    std::vector<std::string> segments;
    std::map<std::string, std::string> query;
};

Target parse_target(std::string_view target)
{
    auto out = Target {};
    auto const q = target.find('?');
    auto path = target.substr(0, q);
    while (!path.empty())
    {
        auto const slash = path.find('/');
        auto part = path.substr(0, slash);
        if (!part.empty())
            out.segments.emplace_back(part);
        if (slash == std::string_view::npos)
            break;
        path.remove_prefix(slash + 1);
    }
    if (q != std::string_view::npos)
    {
        auto rest = target.substr(q + 1);
        while (!rest.empty())
        {
            auto const amp = rest.find('&');
            auto const pair = rest.substr(0, amp);
            auto const eq = pair.find('=');
            out.query.emplace(std::string(pair.substr(0, eq)),
                              eq == std::string_view::npos ? std::string {} : std::string(pair.substr(eq + 1)));
            if (amp == std::string_view::npos)
                break;
            rest.remove_prefix(amp + 1);
        }
    }
    return out;
}

std::uint64_t parse_u64(const std::string& text, const char* what)
{
    try
    {
        std::size_t used = 0;
        auto const value = std::stoull(text, &used);
        if (used == text.size())
            return value;
    }
    catch (const std::exception&)
    {
    }
    throw Error(ErrorCode::InvalidArgument, fmt::format("{} must be a non-negative integer", what));
}

Response make_response(const Request& req, http::status status, std::string body, std::string_view type)
{
    auto res = Response { status, req.version() };
    res.set(http::field::server, "companion");
    res.set(http::field::content_type, beast::string_view(type.data(), type.size()));
    res.set(http::field::access_control_allow_origin, "*");
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
}

Response json_response(const Request& req, int status, const json& body)
{
    return make_response(req, static_cast<http::status>(status), body.dump(), "application/json");
}

json body_of(const Request& req)
{
    if (req.body().empty())
        return json::object();
    auto doc = json::parse(req.body());
    if (!doc.is_object())
        throw Error(ErrorCode::InvalidDocument, "request body must be a JSON object");
    return doc;
}

Response handle_session(SessionService& svc, const Request& req, const std::string& id, const std::string& action,
                        const Target& target)
{
    auto const method = req.method();
    if (action.empty() && method == http::verb::get)
        return json_response(req, 200, svc.get_session(id));

    if (action == "strokes" && method == http::verb::post)
    {
        auto const body = body_of(req);
        auto strokes = std::vector<Polyline> {};
        for (auto const& s: body.value("strokes", json::array()))
            strokes.push_back(stroke_from_json(s));
        auto key = std::optional<std::string> {};
        if (body.contains("idempotency_key"))
            key = body["idempotency_key"].get<std::string>();
        else if (auto it = req.find("Idempotency-Key"); it != req.end())
            key = std::string(it->value());
        auto const result = svc.post_strokes(id, std::move(strokes), key);
        return json_response(
            req, 200, { { "revision", result.revision }, { "element_id", result.element_id }, { "replayed", result.replayed } });
    }

    if (action == "message" && method == http::verb::post)
    {
        auto const body = body_of(req);
        auto const record = svc.post_message(id, body.value("text", std::string {}), body.value("attach_image", true));
        return json_response(req, 200, to_json(record));
    }

    if (action == "signal" && method == http::verb::post)
    {
        auto const body = body_of(req);
        auto signal = Signal {};
        signal.kind = signal_kind_from_string(body.value("kind", std::string {}));
        if (body.contains("photo_png_base64"))
        {
            auto const bytes = base64_decode(body["photo_png_base64"].get<std::string>());
            signal.photo = decode_png(bytes);
        }
        if (body.contains("corners"))
        {
            auto const& c = body["corners"];
            if (!c.is_array() || c.size() != 4)
                throw Error(ErrorCode::InvalidDocument, "corners must hold four [x, y] points");
            auto corners = std::array<Point, 4> {};
            for (std::size_t i = 0; i < 4; ++i)
                corners[i] = { c[i].at(0).get<double>(), c[i].at(1).get<double>() };
            signal.corners = corners;
        }
        return json_response(req, 200, svc.signal(id, signal));
    }

    if (action == "svg" && method == http::verb::get)
    {
        auto revision = std::optional<std::uint64_t> {};
        if (auto it = target.query.find("revision"); it != target.query.end())
            revision = parse_u64(it->second, "revision");
        return make_response(req, http::status::ok, svc.svg(id, revision), "image/svg+xml");
    }

    if (action == "pen-program" && method == http::verb::get)
        return make_response(req, http::status::ok, svc.pen_program(id), "text/plain; charset=utf-8");

    if (action == "events" && method == http::verb::get)
    {
        auto since = std::uint64_t { 0 };
        if (auto it = target.query.find("since"); it != target.query.end())
            since = parse_u64(it->second, "since");
        return json_response(req, 200, { { "events", svc.events_since(id, since) } });
    }

    return json_response(req, 404, { { "code", "NotFound" }, { "message", "no such route" } });
}

Response handle(SessionService& svc, const Request& req)
{
    try
    {
        if (req.method() == http::verb::options)
        {
            auto res = make_response(req, http::status::no_content, {}, "text/plain");
            res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
            res.set(http::field::access_control_allow_headers, "Content-Type, Idempotency-Key");
            return res;
        }
        auto const target = parse_target(std::string_view(req.target().data(), req.target().size()));
        auto const& seg = target.segments;
        if (seg.empty() || seg[0] != "sessions" || seg.size() > 3)
            return json_response(req, 404, { { "code", "NotFound" }, { "message", "no such route" } });

        if (seg.size() == 1)
        {
            if (req.method() == http::verb::get)
                return json_response(req, 200, { { "sessions", svc.list_sessions() } });
            if (req.method() == http::verb::post)
            {
                auto const body = body_of(req);
                auto options = CreateOptions {};
                options.mode = library_mode_from_string(body.value("library_mode", std::string { "none" }));
                if (body.contains("seed"))
                    options.seed = body["seed"].get<std::uint64_t>();
                auto const id = svc.create_session(options);
                return json_response(req, 201, { { "id", id } });
            }
            return json_response(req, 405, { { "code", "MethodNotAllowed" }, { "message", "use GET or POST" } });
        }
        return handle_session(svc, req, seg[1], seg.size() == 3 ? seg[2] : std::string {}, target);
    }
    catch (const Error& e)
    {
        return json_response(req, http_status_for(e.code()), e.to_json());
    }
    catch (const json::exception& e)
    {
        return json_response(req, 400, { { "code", "InvalidDocument" }, { "message", e.what() } });
    }
    catch (const std::exception& e)
    {
        return json_response(req, 500, { { "code", "Internal" }, { "message", e.what() } });
    }
}

class WsSession: public std::enable_shared_from_this<WsSession>
{
  public:
    WsSession(tcp::socket&& socket, SessionService& service, std::string id, std::optional<std::uint64_t> since)
        : _ws(std::move(socket)), _service(service), _id(std::move(id)), _since(since)
    {
    }

    ~WsSession()
    {
        if (_token)
            _service.unsubscribe(_id, *_token);
    }

    void run(Request req)
    {
        _ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        _ws.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
    }

  private:
    void on_accept(beast::error_code ec)
    {
        if (ec)
            return;
        auto weak = weak_from_this();
        auto executor = _ws.get_executor();
        _token = _service.subscribe(
            _id,
            [weak, executor](const json& event) {
                net::post(executor, [weak, text = event.dump()]() mutable {
                    if (auto self = weak.lock())
                        self->enqueue(std::move(text));
                });
            },
            _since);
        do_read();
    }

    void do_read()
    {
        _ws.async_read(_buffer, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t)
    {
        if (ec)
        {
            close();
            return;
        }
        _buffer.consume(_buffer.size());
        do_read();
    }

    void close()
    {
        _closed = true;
        _queue.clear();
        if (_token)
        {
            _service.unsubscribe(_id, *_token);
            _token.reset();
        }
    }

    void enqueue(std::string text)
    {
        if (_closed)
            return;
        _queue.push_back(std::move(text));
        if (_queue.size() == 1)
            do_write();
    }

    void do_write()
    {
        _ws.text(true);
        _ws.async_write(net::buffer(_queue.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t)
    {
        if (ec)
        {
            close();
            return;
        }
        _queue.pop_front();
        if (!_queue.empty())
            do_write();
    }

    websocket::stream<beast::tcp_stream> _ws;
    beast::flat_buffer _buffer;
    SessionService& _service;
    std::string _id;
    std::optional<std::uint64_t> _since;
    std::optional<std::uint64_t> _token;
    std::deque<std::string> _queue;
    bool _closed = false;
};

class HttpConnection: public std::enable_shared_from_this<HttpConnection>
{
  public:
    HttpConnection(tcp::socket&& socket, SessionService& service, net::thread_pool& workers)
        : _stream(std::move(socket)), _service(service), _workers(workers)
    {
    }

    void run()
    {
        net::dispatch(_stream.get_executor(), beast::bind_front_handler(&HttpConnection::do_read, shared_from_this()));
    }

  private:
    void do_read()
    {
        _parser.emplace();
        _parser->body_limit(kBodyLimit);
        _stream.expires_after(std::chrono::seconds(60));
        http::async_read(_stream, _buffer, *_parser, beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t)
    {
        if (ec == http::error::end_of_stream)
        {
            beast::error_code ignored;
            _stream.socket().shutdown(tcp::socket::shutdown_send, ignored);
            return;
        }
        if (ec)
            return;
        auto req = _parser->release();

        if (websocket::is_upgrade(req))
        {
            auto const target = parse_target(std::string_view(req.target().data(), req.target().size()));
            auto const& seg = target.segments;
            if (seg.size() == 3 && seg[0] == "sessions" && seg[2] == "events")
            {
                try
                {
                    (void) _service.get_session(seg[1]);
                    auto since = std::optional<std::uint64_t> {};
                    if (auto it = target.query.find("since"); it != target.query.end())
                        since = parse_u64(it->second, "since");
                    _stream.expires_never();
                    std::make_shared<WsSession>(_stream.release_socket(), _service, seg[1], since)->run(std::move(req));
                    return;
                }
                catch (const Error& e)
                {
                    write(json_response(req, http_status_for(e.code()), e.to_json()));
                    return;
                }
            }
            write(json_response(req, 404, { { "code", "NotFound" }, { "message", "no such event stream" } }));
            return;
        }

        // Turns block for as long as the model takes; keep them off the I/O threads.
        _stream.expires_never();
        net::post(_workers, [self = shared_from_this(), req = std::move(req)]() mutable {
            auto res = handle(self->_service, req);
            net::post(self->_stream.get_executor(),
                      [self, res = std::move(res)]() mutable { self->write(std::move(res)); });
        });
    }

    void write(Response res)
    {
        auto owned = std::make_shared<Response>(std::move(res));
        auto const keep_alive = owned->keep_alive();
        http::async_write(_stream, *owned, [self = shared_from_this(), owned, keep_alive](beast::error_code ec, std::size_t) {
            if (ec)
                return;
            if (!keep_alive)
            {
                beast::error_code ignored;
                self->_stream.socket().shutdown(tcp::socket::shutdown_send, ignored);
                return;
            }
            self->do_read();
        });
    }

    beast::tcp_stream _stream;
    beast::flat_buffer _buffer;
    std::optional<http::request_parser<http::string_body>> _parser;
    SessionService& _service;
    net::thread_pool& _workers;
};

} // namespace

int http_status_for(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::UnknownSession: return 404;
        case ErrorCode::TurnInProgress: return 409;
        case ErrorCode::BackendError: return 502;
        case ErrorCode::Timeout: return 504;
        case ErrorCode::Io: return 500;
        default: return 400;
    }
}

struct HttpServer::Impl
{
    Impl(SessionService& s, int n): service(s), acceptor(net::make_strand(ioc)), workers(static_cast<std::size_t>(n)), threads(n) {}

    void do_accept()
    {
        acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
            if (ec)
                return;
            std::make_shared<HttpConnection>(std::move(socket), service, workers)->run();
            do_accept();
        });
    }

    SessionService& service;
    net::io_context ioc;
    tcp::acceptor acceptor;
    net::thread_pool workers;
    int threads;
    std::vector<std::thread> io_threads;
    std::mutex mutex;
    std::condition_variable stopped_cv;
    bool started = false;
    bool stopped = false;
};

HttpServer::HttpServer(SessionService& service, const std::string& address, std::uint16_t port, int threads)
    : _impl(std::make_unique<Impl>(service, std::max(1, threads)))
{
    auto const endpoint = tcp::endpoint(net::ip::make_address(address), port);
    auto& acceptor = _impl->acceptor;
    acceptor.open(endpoint.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen(net::socket_base::max_listen_connections);
}

HttpServer::~HttpServer()
{
    stop();
}

std::uint16_t HttpServer::port() const noexcept
{
    beast::error_code ec;
    return _impl->acceptor.local_endpoint(ec).port();
}

void HttpServer::start()
{
    auto lock = std::lock_guard(_impl->mutex);
    if (_impl->started)
        return;
    _impl->started = true;
    _impl->do_accept();
    for (int i = 0; i < _impl->threads; ++i)
        _impl->io_threads.emplace_back([this] { _impl->ioc.run(); });
}

void HttpServer::wait()
{
    auto lock = std::unique_lock(_impl->mutex);
    _impl->stopped_cv.wait(lock, [this] { return _impl->stopped; });
}

void HttpServer::stop()
{
    {
        auto lock = std::lock_guard(_impl->mutex);
        if (_impl->stopped)
            return;
        _impl->stopped = true;
    }
    net::post(_impl->acceptor.get_executor(), [this] {
        beast::error_code ignored;
        _impl->acceptor.close(ignored);
    });
    _impl->workers.join();
    _impl->ioc.stop();
    for (auto& t: _impl->io_threads)
        t.join();
    _impl->stopped_cv.notify_all();
}

} // namespace companion
