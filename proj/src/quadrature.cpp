#include "levyruin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "levyruin/errors.hpp"

namespace levyruin::detail {

namespace {

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

// One workspace per nesting depth, so integrands may themselves integrate.
class WorkspaceLease {
public:
    explicit WorkspaceLease(std::size_t n) {
        if (pool().size() <= depth()) pool().emplace_back();
        auto& slot = pool()[depth()];
        if (!slot.ws || slot.size < n) {
            slot.ws.reset(gsl_integration_workspace_alloc(n));
            slot.size = n;
        }
        ws_ = slot.ws.get();
        ++depth();
    }
    ~WorkspaceLease() { --depth(); }
    WorkspaceLease(const WorkspaceLease&) = delete;
    WorkspaceLease& operator=(const WorkspaceLease&) = delete;
    gsl_integration_workspace* get() const { return ws_; }

private:
    struct Slot {
        std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws;
        std::size_t size = 0;
    };
    static std::vector<Slot>& pool() {
        thread_local std::vector<Slot> p;
        return p;
    }
    static std::size_t& depth() {
        thread_local std::size_t d = 0;
        return d;
    }
    gsl_integration_workspace* ws_;
};

void disable_gsl_abort() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

}  // namespace

QuadResult integrate_raw(RawIntegrand f, void* ctx, double a, double b, const QuadConfig& cfg) {
    if (std::isnan(a) || std::isnan(b)) throw DomainError("integration limits are NaN");
    if (a == b) return {};
    if (a > b) {
        QuadResult r = integrate_raw(f, ctx, b, a, cfg);
        return {-r.value, r.abs_error};
    }
    disable_gsl_abort();
    const std::size_t limit = std::max<std::size_t>(cfg.max_subdivisions, 10);
    WorkspaceLease lease(limit);
    gsl_integration_workspace* w = lease.get();
    gsl_function fn{f, ctx};
    double value = 0.0, err = 0.0;
    int status;
    if (std::isinf(a) && std::isinf(b)) {
        status = gsl_integration_qagi(&fn, cfg.abs_tol, cfg.rel_tol, limit, w, &value, &err);
    } else if (std::isinf(b)) {
        status = gsl_integration_qagiu(&fn, a, cfg.abs_tol, cfg.rel_tol, limit, w, &value, &err);
    } else if (std::isinf(a)) {
        status = gsl_integration_qagil(&fn, b, cfg.abs_tol, cfg.rel_tol, limit, w, &value, &err);
    } else {
        status = gsl_integration_qags(&fn, a, b, cfg.abs_tol, cfg.rel_tol, limit, w, &value, &err);
    }
    if (!std::isfinite(value)) throw QuadratureError("integral is not finite", err);
    if (status != GSL_SUCCESS) {
        // Roundoff-limited results that are still close to the target are kept
        // with their honest error estimate.
        const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
        if (status == GSL_EROUND && err <= 1e3 * target) return {value, err};
        throw QuadratureError(std::string("adaptive quadrature failed: ") + gsl_strerror(status), err);
    }
    return {value, err};
}

}  // namespace levyruin::detail
