#include "rotorlab/sysid.hpp"

#include "rotorlab/csv.hpp"
#include "rotorlab/errors.hpp"
#include "rotorlab/filter.hpp"
#include "rotorlab/math.hpp"
#include "rotorlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rotorlab {

namespace {

double parse_field(const std::string& s, const std::string& what, std::size_t lineno) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError("log: bad " + what + " value '" + s + "' at line " +
                         std::to_string(lineno));
    }
}

std::string join_header(const std::vector<std::string>& h) {
    std::string s;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i) s += ',';
        s += h[i];
    }
    return s;
}

} // namespace

std::vector<LogFrame> ingest_log(const std::string& path) {
    const CsvTable table = read_csv(path);
    const std::string header = join_header(table.header);
    bool degrees = false;
    if (header == kLogHeaderDeg) {
        degrees = true;
    } else if (header != kLogHeader) {
        throw InputError("schema-mismatch: expected header '" + std::string(kLogHeader) +
                         "' in " + path);
    }

    std::vector<LogFrame> frames;
    frames.reserve(table.rows.size());
    const double rate_scale = degrees ? kPi / 180.0 : 1.0;
    std::size_t lineno = 1; // header is line 1
    for (const auto& row : table.rows) {
        ++lineno;
        if (row.size() != 11) {
            throw InputError("schema-mismatch: expected 11 fields at line " +
                             std::to_string(lineno));
        }
        LogFrame f;
        f.t = parse_field(row[0], "t", lineno);
        f.p = rate_scale * parse_field(row[1], "p", lineno);
        f.q = rate_scale * parse_field(row[2], "q", lineno);
        f.delta_x = parse_field(row[3], "dx", lineno);
        f.delta_y = parse_field(row[4], "dy", lineno);
        f.rpm = parse_field(row[5], "rpm", lineno);
        f.collective_cmd = parse_field(row[6], "coll", lineno);
        f.throttle = parse_field(row[7], "thr", lineno);
        f.current_a = parse_field(row[8], "amps", lineno);
        f.voltage_v = parse_field(row[9], "volts", lineno);
        if (row[10].empty()) {
            f.airspeed_valid = false;
        } else {
            f.airspeed_ms = parse_field(row[10], "tas", lineno);
            f.airspeed_valid = true;
        }
        if (!frames.empty() && !(f.t > frames.back().t)) {
            throw InputError("non-monotone-time: timestamp does not increase at line " +
                             std::to_string(lineno));
        }
        frames.push_back(f);
    }
    return frames;
}

void write_log_csv(const std::string& path, const std::vector<LogFrame>& frames) {
    CsvWriter csv(path, {"t", "p", "q", "dx", "dy", "rpm", "coll", "thr", "amps", "volts", "tas"});
    for (const auto& f : frames) {
        std::vector<std::string> row{
            CsvWriter::format(f.t),      CsvWriter::format(f.p),
            CsvWriter::format(f.q),      CsvWriter::format(f.delta_x),
            CsvWriter::format(f.delta_y), CsvWriter::format(f.rpm),
            CsvWriter::format(f.collective_cmd), CsvWriter::format(f.throttle),
            CsvWriter::format(f.current_a), CsvWriter::format(f.voltage_v),
            f.airspeed_valid ? CsvWriter::format(f.airspeed_ms) : std::string{}};
        csv.raw_row(row);
    }
}

std::vector<double> filter_second_order(const std::vector<double>& signal, double cutoff_rad_s,
                                        double dt_s) {
    SecondOrderLowpass f(cutoff_rad_s, dt_s);
    return f.apply(signal);
}

namespace {

double log_sample_time(const std::vector<LogFrame>& log) {
    const double dt = log[1].t - log[0].t;
    for (std::size_t i = 1; i < log.size(); ++i) {
        const double step = log[i].t - log[i - 1].t;
        if (std::abs(step - dt) > 1e-6 * std::max(1.0, std::abs(dt))) {
            throw InputError("log: non-uniform sampling, cannot differentiate");
        }
    }
    return dt;
}

} // namespace

RateDerivatives derive_rates(const std::vector<LogFrame>& log, double cutoff_rad_s) {
    if (log.size() < 3) throw InputError("too-few-frames: need at least 3 log frames");
    const double dt = log_sample_time(log);

    std::vector<double> p(log.size()), q(log.size());
    for (std::size_t i = 0; i < log.size(); ++i) {
        p[i] = log[i].p;
        q[i] = log[i].q;
    }
    const std::vector<double> pf = filter_second_order(p, cutoff_rad_s, dt);
    const std::vector<double> qf = filter_second_order(q, cutoff_rad_s, dt);

    RateDerivatives out;
    out.dt = dt;
    for (std::size_t k = 1; k + 1 < log.size(); ++k) {
        out.t.push_back(log[k].t);
        out.p_dot.push_back((pf[k + 1] - pf[k - 1]) / (2.0 * dt));
        out.q_dot.push_back((qf[k + 1] - qf[k - 1]) / (2.0 * dt));
        out.p_filt.push_back(pf[k]);
        out.q_filt.push_back(qf[k]);
        out.index.push_back(k);
    }
    return out;
}

RateModelFit fit_rate_model(const std::vector<LogFrame>& log, const RateFitOptions& opts) {
    const RateDerivatives d = derive_rates(log, opts.cutoff_rad_s);

    // the same filter shapes targets and regressors, so the linear relation
    // between them survives the filtering exactly
    const std::size_t n = log.size();
    std::vector<double> ones(n, 1.0), dx(n), dy(n), p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        dx[i] = log[i].delta_x;
        dy[i] = log[i].delta_y;
        p[i] = log[i].p;
        q[i] = log[i].q;
    }
    const std::vector<double> fones = filter_second_order(ones, opts.cutoff_rad_s, d.dt);
    const std::vector<double> fdx = filter_second_order(dx, opts.cutoff_rad_s, d.dt);
    const std::vector<double> fdy = filter_second_order(dy, opts.cutoff_rad_s, d.dt);
    const std::vector<double> fp = filter_second_order(p, opts.cutoff_rad_s, d.dt);
    const std::vector<double> fq = filter_second_order(q, opts.cutoff_rad_s, d.dt);

    const std::size_t burn =
        static_cast<std::size_t>(std::ceil(opts.burn_in_time_constants / (opts.cutoff_rad_s * d.dt)));
    if (d.index.size() <= burn + 5) {
        throw InputError("too-few-frames: log shorter than the filter burn-in window");
    }

    std::vector<std::vector<double>> cols(5);
    std::vector<double> yp, yq;
    for (std::size_t j = 0; j < d.index.size(); ++j) {
        const std::size_t k = d.index[j];
        if (k < burn) continue;
        cols[0].push_back(fones[k]);
        cols[1].push_back(fdx[k]);
        cols[2].push_back(fdy[k]);
        cols[3].push_back(fp[k]);
        cols[4].push_back(fq[k]);
        yp.push_back(d.p_dot[j]);
        yq.push_back(d.q_dot[j]);
    }

    const OlsResult rp = ols_fit(cols, yp);
    const OlsResult rq = ols_fit(cols, yq);

    RateModelFit fit;
    fit.fp = {rp.coefficients[0], rp.coefficients[1], rp.coefficients[2], rp.coefficients[3],
              rp.coefficients[4]};
    fit.fq = {rq.coefficients[0], rq.coefficients[1], rq.coefficients[2], rq.coefficients[3],
              rq.coefficients[4]};
    fit.residual_rms_p = rp.residual_rms;
    fit.residual_rms_q = rq.residual_rms;
    fit.orthogonality = std::max(rp.orthogonality, rq.orthogonality);
    fit.used_qr_fallback = rp.used_qr_fallback || rq.used_qr_fallback;
    return fit;
}

PlanarFit fit_planar_power(const std::vector<PlanarSample>& samples) {
    if (samples.size() < 3) {
        throw NumericError("degenerate-samples: need at least 3 planar samples");
    }
    std::vector<std::vector<double>> cols(3);
    std::vector<double> y;
    for (const auto& s : samples) {
        cols[0].push_back(1.0);
        cols[1].push_back(s.pitch);
        cols[2].push_back(s.throttle);
        y.push_back(s.power_w);
    }
    try {
        const OlsResult r = ols_fit(cols, y);
        return {r.coefficients[0], r.coefficients[1], r.coefficients[2], r.residual_rms};
    } catch (const NumericError&) {
        throw NumericError("degenerate-samples: planar regressors are collinear");
    }
}

double fit_pole_drag(const std::vector<DragSample>& samples, double rho) {
    double sxx = 0.0, sxd = 0.0;
    bool any_moving = false;
    for (const auto& s : samples) {
        const double x = 0.5 * rho * s.airspeed_ms * s.airspeed_ms;
        if (s.airspeed_ms > 0.0) any_moving = true;
        sxx += x * x;
        sxd += x * s.drag_n;
    }
    if (!any_moving || sxx <= 0.0) {
        throw InputError("no-valid-samples: need at least one sample with V > 0");
    }
    return sxd / sxx;
}

std::vector<LogFrame> make_synthetic_rate_log(const RateModel& model,
                                              const SyntheticLogOptions& opts) {
    if (!(opts.duration_s > 0.0) || !(opts.sample_hz > 0.0)) {
        throw ConfigError("synthetic log: duration and sample rate must be > 0");
    }
    const double dt = 1.0 / opts.sample_hz;
    const std::size_t n = static_cast<std::size_t>(std::llround(opts.duration_s * opts.sample_hz)) + 1;
    if (n < 16) throw ConfigError("synthetic log: too short");

    // smooth multi-sine rates, well inside the 15 rad/s fit band
    struct Tone {
        double amp, freq_hz, phase;
    };
    const std::vector<Tone> tones_p{{0.55, 0.13, 0.3}, {0.40, 0.31, 1.1}, {0.30, 0.57, 2.0},
                                    {0.20, 0.83, 0.7}};
    const std::vector<Tone> tones_q{{0.50, 0.19, 1.7}, {0.35, 0.41, 0.2}, {0.30, 0.67, 2.6},
                                    {0.18, 1.01, 1.3}};

    std::vector<double> p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = i * dt;
        double vp = 0.08, vq = -0.05; // small trims exercise the offset column
        for (const auto& tn : tones_p) vp += tn.amp * std::sin(2.0 * kPi * tn.freq_hz * t + tn.phase);
        for (const auto& tn : tones_q) vq += tn.amp * std::sin(2.0 * kPi * tn.freq_hz * t + tn.phase);
        p[i] = vp;
        q[i] = vq;
    }

    // model-implied accelerations from the discrete central difference
    std::vector<double> ap(n, 0.0), aq(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        ap[i] = (p[i + 1] - p[i - 1]) / (2.0 * dt);
        aq[i] = (q[i + 1] - q[i - 1]) / (2.0 * dt);
    }

    if (opts.accel_noise_fraction > 0.0) {
        double ms = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) ms += ap[i] * ap[i] + aq[i] * aq[i];
        const double rms = std::sqrt(ms / (2.0 * (n - 2)));
        Rng rng(opts.seed);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            ap[i] += opts.accel_noise_fraction * rms * rng.normal();
            aq[i] += opts.accel_noise_fraction * rms * rng.normal();
        }
    }

    // back-solve the inputs through the effectiveness matrix
    const Mat2 g = model.effectiveness();
    const double det = g.det();
    if (std::abs(det) <= 1e-12) {
        throw NumericError("singular-G: cannot back-solve synthetic inputs");
    }

    std::vector<LogFrame> log(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t m = std::min(std::max<std::size_t>(i, 1), n - 2);
        const double rx = ap[m] - model.fp.c_o - model.fp.c_p * p[m] - model.fp.c_q * q[m];
        const double ry = aq[m] - model.fq.c_o - model.fq.c_p * p[m] - model.fq.c_q * q[m];
        LogFrame& f = log[i];
        f.t = i * dt;
        f.p = p[i];
        f.q = q[i];
        f.delta_x = (g.d * rx - g.b * ry) / det;
        f.delta_y = (-g.c * rx + g.a * ry) / det;
        f.rpm = 1650.0;
        f.voltage_v = 24.0;
    }
    return log;
}

} // namespace rotorlab
