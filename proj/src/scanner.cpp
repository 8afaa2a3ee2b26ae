// Copyright 2026 The aibomgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aibomgen/scanner.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "aibomgen/errors.hpp"

namespace aibomgen {

namespace {

// Dotted numeric version, missing parts read as zero ("1.2" == "1.2.0").
std::optional<std::vector<uint64_t>> parse_version(std::string_view text)
{
    if (text.empty()) return std::nullopt;
    std::vector<uint64_t> parts;
    size_t start = 0;
    while (start <= text.size()) {
        size_t dot = text.find('.', start);
        std::string_view part = dot == std::string_view::npos
                                    ? text.substr(start)
                                    : text.substr(start, dot - start);
        uint64_t value = 0;
        auto res = std::from_chars(part.data(), part.data() + part.size(), value);
        if (res.ec != std::errc() || res.ptr != part.data() + part.size())
            return std::nullopt;
        parts.push_back(value);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    if (parts.empty() || parts.size() > 4) return std::nullopt;
    return parts;
}

int compare_versions(const std::vector<uint64_t>& a,
                     const std::vector<uint64_t>& b)
{
    size_t n = std::max(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        uint64_t av = i < a.size() ? a[i] : 0;
        uint64_t bv = i < b.size() ? b[i] : 0;
        if (av != bv) return av < bv ? -1 : 1;
    }
    return 0;
}

}  // namespace

const char* severity_name(Severity s)
{
    switch (s) {
        case Severity::Low: return "LOW";
        case Severity::Medium: return "MEDIUM";
        case Severity::High: return "HIGH";
        case Severity::Critical: return "CRITICAL";
    }
    return "LOW";
}

std::optional<Severity> severity_from_name(std::string_view name)
{
    if (name == "LOW") return Severity::Low;
    if (name == "MEDIUM") return Severity::Medium;
    if (name == "HIGH") return Severity::High;
    if (name == "CRITICAL") return Severity::Critical;
    return std::nullopt;
}

AdvisoryDb AdvisoryDb::from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
        throw Error(Errc::MalformedDocument, "advisory db: missing entries list");
    AdvisoryDb db;
    std::set<std::string> seen;
    for (const auto& e : j["entries"]) {
        Advisory adv;
        adv.advisory_id = e.at("advisory_id").get<std::string>();
        adv.component_name = e.at("component_name").get<std::string>();
        adv.version_range = e.at("version_range").get<std::string>();
        auto sev = severity_from_name(e.at("severity").get<std::string>());
        if (!sev)
            throw Error(Errc::MalformedDocument,
                        "advisory db: unknown severity for " + adv.advisory_id);
        adv.severity = *sev;
        if (!seen.insert(adv.advisory_id).second)
            throw Error(Errc::MalformedDocument,
                        "advisory db: duplicate advisory_id " + adv.advisory_id);
        db.entries.push_back(std::move(adv));
    }
    return db;
}

AdvisoryDb AdvisoryDb::load(const std::string& path)
{
    return from_json(canonical_parse(read_file(path)));
}

bool version_in_range(const std::string& version, const std::string& range)
{
    auto v = parse_version(version);
    if (!v) return false;
    if (range == "*") return true;

    size_t pos = 0;
    bool any_term = false;
    while (pos < range.size()) {
        while (pos < range.size() && range[pos] == ' ') ++pos;
        if (pos >= range.size()) break;
        size_t end = range.find(' ', pos);
        std::string term = range.substr(pos, end == std::string::npos
                                                 ? std::string::npos
                                                 : end - pos);
        pos = end == std::string::npos ? range.size() : end + 1;

        std::string op;
        size_t vi = 0;
        while (vi < term.size() && (term[vi] == '<' || term[vi] == '>' ||
                                    term[vi] == '='))
            op += term[vi++];
        std::string bound_text = term.substr(vi);
        auto bound = parse_version(bound_text);
        if (!bound) return false;
        int cmp = compare_versions(*v, *bound);
        bool ok;
        if (op == "<")
            ok = cmp < 0;
        else if (op == "<=")
            ok = cmp <= 0;
        else if (op == ">")
            ok = cmp > 0;
        else if (op == ">=")
            ok = cmp >= 0;
        else if (op == "=" || op == "==" || op.empty())
            ok = cmp == 0;
        else
            return false;
        if (!ok) return false;
        any_term = true;
    }
    return any_term;
}

Json ScanReport::to_json() const
{
    Json finds = Json::array();
    for (const auto& f : findings)
        finds.push_back(Json{{"advisory_id", f.advisory_id},
                             {"component_name", f.component_name},
                             {"component_version", f.component_version},
                             {"severity", severity_name(f.severity)}});
    Json sum = Json::object();
    for (const auto& [sev, count] : summary) sum[sev] = count;
    return Json{{"scanned_at", scanned_at},
                {"target_digest", target_digest.to_json()},
                {"findings", finds},
                {"summary", sum}};
}

ScanReport ScanReport::from_json(const Json& j)
{
    ScanReport report;
    report.scanned_at = j.at("scanned_at").get<std::string>();
    report.target_digest = Digest::from_json(j.at("target_digest"));
    for (const auto& f : j.at("findings")) {
        Finding finding;
        finding.advisory_id = f.at("advisory_id").get<std::string>();
        finding.component_name = f.at("component_name").get<std::string>();
        finding.component_version = f.at("component_version").get<std::string>();
        auto sev = severity_from_name(f.at("severity").get<std::string>());
        if (!sev) throw Error(Errc::MalformedDocument, "scan report severity");
        finding.severity = *sev;
        report.findings.push_back(std::move(finding));
    }
    for (auto it = j.at("summary").begin(); it != j.at("summary").end(); ++it)
        report.summary[it.key()] = it.value().get<uint64_t>();
    return report;
}

ScanSummary ScanReport::scan_summary() const
{
    ScanSummary s;
    s.counts = summary;
    return s;
}

ScanReport scan(const std::vector<ComponentVersion>& manifest,
                const AdvisoryDb& db, const std::string& scanned_at)
{
    ScanReport report;
    report.scanned_at = scanned_at;

    Json manifest_doc = Json::array();
    for (const auto& c : manifest)
        manifest_doc.push_back(Json{{"name", c.name}, {"version", c.version}});
    report.target_digest = compute_digest(canonical_serialize(manifest_doc));

    for (const auto& adv : db.entries)
        for (const auto& component : manifest)
            if (component.name == adv.component_name &&
                version_in_range(component.version, adv.version_range))
                report.findings.push_back({adv.advisory_id, component.name,
                                           component.version, adv.severity});
    std::sort(report.findings.begin(), report.findings.end(),
              [](const Finding& a, const Finding& b) {
                  return std::tie(a.advisory_id, a.component_name) <
                         std::tie(b.advisory_id, b.component_name);
              });
    for (const auto& f : report.findings)
        report.summary[severity_name(f.severity)] += 1;
    return report;
}

ScanScheduler::ScanScheduler(Store& store, AdvisoryDb db,
                             std::vector<ComponentVersion> manifest,
                             ClockFn clock)
    : store_(store),
      db_(std::move(db)),
      manifest_(std::move(manifest)),
      clock_(std::move(clock))
{
}

ScanScheduler::~ScanScheduler() { stop(); }

ArtifactRef ScanScheduler::scan_once()
{
    TimePoint now = clock_();
    ScanReport report = scan(manifest_, db_, format_rfc3339(now));
    std::string name = format_compact_ms(now) + ".json";
    ArtifactRef ref = store_.put_object(ObjectKey{"scans", name},
                                        canonical_serialize(report.to_json()),
                                        "application/json");
    // Object names are namespace-relative; qualify for later resolution.
    ref.name = "scans/" + ref.name;
    std::lock_guard<std::mutex> lock(mutex_);
    latest_ref_ = ref;
    latest_summary_ = report.scan_summary();
    return ref;
}

void ScanScheduler::start(uint64_t interval_seconds)
{
    if (running_.exchange(true)) return;
    scan_once();
    thread_ = std::thread([this, interval_seconds] {
        std::unique_lock<std::mutex> lock(cv_mutex_);
        while (running_) {
            cv_.wait_for(lock, std::chrono::seconds(interval_seconds),
                         [this] { return !running_.load(); });
            if (!running_) break;
            lock.unlock();
            try {
                scan_once();
            } catch (const Error&) {
                // Scan failures must not take the platform down; the stale
                // report stays referenced until the next successful pass.
            }
            lock.lock();
        }
    });
}

void ScanScheduler::stop()
{
    if (!running_.exchange(false)) return;
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
}

std::optional<ArtifactRef> ScanScheduler::latest_report_ref() const
{
    std::lock_guard<std::mutex> lock(mutex_);
    return latest_ref_;
}

std::optional<ScanSummary> ScanScheduler::latest_summary() const
{
    std::lock_guard<std::mutex> lock(mutex_);
    return latest_summary_;
}

}  // namespace aibomgen
