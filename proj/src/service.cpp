#include "nblens/service.hpp"

#include <httplib.h>

#include <json.hpp>

#include "nblens/errors.hpp"

namespace nblens {

namespace {

using nlohmann::json;

int status_for(const std::string& code) {
    if (code == "MalformedDocument" || code == "UnsupportedFormat" || code == "MissingCells" ||
        code == "InvalidEncoding")
        return 400;
    if (code == "InvalidTier") return 422;
    return 500;
}

std::string error_body(const std::string& code, const std::string& message) {
    json doc;
    doc["error"] = code;
    doc["message"] = message;
    return doc.dump();
}

// Query parameter pt, default 0. Non-numeric values map to InvalidTier so the
// caller sees a 422 rather than a silent default.
int parse_pt(const httplib::Request& req) {
    if (!req.has_param("pt")) return 0;
    const std::string raw = req.get_param_value("pt");
    try {
        std::size_t used = 0;
        int pt = std::stoi(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return pt;
    } catch (const std::exception&) {
        fail("InvalidTier", "pt query parameter must be an integer 0..4");
    }
}

json metrics_to_json(const MetricVector& v) {
    json doc;
    auto vals = v.values();
    const auto& names = metric_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (metric_is_integer(i))
            doc[std::string(names[i])] = static_cast<long long>(std::llround(vals[i]));
        else
            doc[std::string(names[i])] = vals[i];
    }
    return doc;
}

}  // namespace

MetricsService::MetricsService(ModelBundle model, PopularityTable popularity,
                               PipelineConfig pipeline, ServiceConfig service)
    : model_(std::move(model)),
      popularity_(std::move(popularity)),
      pipeline_(std::move(pipeline)),
      service_(service) {}

MetricVector MetricsService::extract(const std::string& body, int pt) const {
    Notebook nb = parse_notebook(body, "uploaded");
    NotebookMetadata meta;
    meta.notebook_id = nb.notebook_id;
    meta.performance_tier = pt;
    return assemble_metric_vector(nb, meta, popularity_, pipeline_.visualization_mimes);
}

std::string MetricsService::metrics_json(const std::string& body, int pt) const {
    return metrics_to_json(extract(body, pt)).dump();
}

std::string MetricsService::predict_json(const std::string& body, int pt) const {
    MetricVector v = extract(body, pt);
    std::vector<std::string> available;
    for (auto name : metric_names()) available.emplace_back(name);
    auto columns = feature_column_map(model_.feature_names, available);
    auto all = v.values();
    std::vector<double> x;
    x.reserve(columns.size());
    for (std::size_t c : columns) x.push_back(all[c]);

    int label = model_.forest.predict(x);
    auto proba = model_.forest.predict_proba(x);

    json doc;
    doc["label"] = model_.class_name(label);
    doc["probability"] = proba.at(label);
    doc["metrics"] = metrics_to_json(v);
    return doc.dump();
}

void MetricsService::install_routes(httplib::Server& server) const {
    server.set_payload_max_length(service_.max_body_bytes);

    auto guarded = [this](const httplib::Request& req, httplib::Response& res,
                          auto&& handler) {
        if (req.body.size() > service_.max_body_bytes) {
            res.status = 413;
            res.set_content(error_body("PayloadTooLarge", "request body over limit"), "application/json");
            return;
        }
        try {
            handler(req, res);
        } catch (const Error& e) {
            res.status = status_for(e.code());
            // Internal errors never leak details to the client.
            if (res.status == 500)
                res.set_content(error_body("InternalError", "internal error"), "application/json");
            else
                res.set_content(error_body(e.code(), e.message()), "application/json");
        } catch (const std::exception&) {
            res.status = 500;
            res.set_content(error_body("InternalError", "internal error"), "application/json");
        }
    };

    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        nlohmann::json doc;
        doc["status"] = "ok";
        doc["model_version"] = current_model_format_version();
        res.set_content(doc.dump(), "application/json");
    });

    server.Post("/metrics", [this, guarded](const httplib::Request& req, httplib::Response& res) {
        guarded(req, res, [this](const httplib::Request& r, httplib::Response& out) {
            out.set_content(metrics_json(r.body, parse_pt(r)), "application/json");
        });
    });

    server.Post("/predict", [this, guarded](const httplib::Request& req, httplib::Response& res) {
        guarded(req, res, [this](const httplib::Request& r, httplib::Response& out) {
            out.set_content(predict_json(r.body, parse_pt(r)), "application/json");
        });
    });
}

}  // namespace nblens
