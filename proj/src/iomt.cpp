#include "riskchain/iomt.hpp"

namespace riskchain {

ThreatModel builtin_iomt_model() {
    ThreatModel m;
    m.alpha = 0.0318;
    m.mu = 0.98;
    m.mu_mode = MuMode::Uniform;
    m.denominator_override = 390.0;

    auto vuln = [&](const char* id, const char* name, double score) {
        VulnerabilityRecord v;
        v.id = id;
        v.name = name;
        v.literal_score = score;
        m.vulnerabilities.push_back(std::move(v));
    };
    vuln("V1", "Weak passwords", 6.3);
    vuln("V2", "Command injection flaw", 5.8);
    vuln("V3", "Insecure web interface", 9.6);
    vuln("V4", "No account lockout", 5.7);
    vuln("V5", "Unlimited allocation of resources", 2.0);
    vuln("V6", "Unencrypted services", 6.8);
    vuln("V7", "Open ports", 7.0);
    vuln("V8", "Insecure network services", 9.6);
    vuln("V9", "Insecure cloud interface", 9.6);
    vuln("V10", "Removal of physical storage", 7.2);
    vuln("V11", "Missing authorization", 8.6);

    auto threat = [&](const char* id, const char* name, Stride stride, Requirement req,
                      std::vector<std::string> exploits, const char* note = "") {
        ThreatRecord t;
        t.id = id;
        t.name = name;
        t.stride = stride;
        t.requirement = req;
        t.exploits = std::move(exploits);
        t.note = note;
        m.threats.push_back(std::move(t));
    };
    threat("A1", "Man-in-the-middle attacks", Stride::Spoofing, Requirement::Authentication,
           {"V3", "V6", "V8", "V9", "V10"});
    threat("A2", "Spoofing attacks", Stride::Spoofing, Requirement::Authentication,
           {"V3", "V6", "V8", "V9", "V10"});
    threat("A3", "Traffic analysis attacks", Stride::Tampering, Requirement::Integrity,
           {"V6", "V8", "V9"});
    threat("A4", "Masquerading attacks", Stride::Spoofing, Requirement::Authentication,
           {"V3", "V6", "V8", "V9", "V10"});
    threat("A5", "Physical attacks", Stride::Tampering, Requirement::Integrity,
           {"V2", "V10"});
    threat("A6", "Malware attacks", Stride::ElevationOfPrivilege, Requirement::Authorization,
           {"V2", "V8", "V9"},
           "Listed twice in the source correlation data (under authorization and "
           "confidentiality); stored once under its first listing.");
    threat("A7", "Eavesdropping attacks", Stride::InformationDisclosure,
           Requirement::Confidentiality, {"V3", "V6", "V8", "V9"});
    threat("A8", "Message fabrication/modification/replay attacks", Stride::Tampering,
           Requirement::Integrity, {"V6"});
    threat("A9", "Social engineering attacks", Stride::InformationDisclosure,
           Requirement::Confidentiality, {"V10"});
    threat("A10", "Ransomware attacks", Stride::DenialOfService, Requirement::Availability,
           {"V1", "V2", "V6", "V8", "V9"});
    threat("A11", "Elevation of privilege", Stride::ElevationOfPrivilege,
           Requirement::Authorization, {"V7"});
    threat("A12", "Denial-of-service attacks", Stride::DenialOfService,
           Requirement::Availability, {"V4", "V9", "V11"});

    return m;
}

std::vector<ReferenceRow> iomt_reference_rows() {
    using enum ReferenceStatus;
    return {
        {"A1", 3.44e-3, Consistent, ""},
        {"A2", 3.44e-3, Consistent, ""},
        {"A3", 2.078e-3, Consistent, ""},
        {"A4", 3.44e-3, Consistent, ""},
        {"A5", 0.939e-3, Inconsistent,
         "Published 0.939e-3 via alpha_5 = 0.00098, but the stated weight ratio gives "
         "alpha_5 = 13.0/390 * 0.0318 = 0.00106 and p = 1.0388e-3."},
        {"A6", 1.99e-3, Consistent, ""},
        {"A7", 1.11e-3, Excluded,
         "Published alpha_7 = 1.132 is not a probability; the weight ratio gives "
         "alpha_7 = 35.6/390 * 0.0318 = 0.0029 and p = 2.845e-3, not 1.11e-3."},
        {"A8", 5.433e-3, Excluded,
         "Published alpha_8 = 0.00554 is ten times the 6.8/390 * 0.0318 = 0.000554 "
         "the weight ratio gives; p should be 5.434e-4, not 5.433e-3."},
        {"A9", 5.753e-3, Excluded,
         "Published alpha_9 = 0.00587 is ten times the 7.2/390 * 0.0318 = 0.000587 "
         "the weight ratio gives; p should be 5.753e-4, not 5.753e-3."},
        {"A10", 3.044e-3, Consistent, ""},
        {"A11", 3.44e-3, Excluded,
         "Published value duplicates the A1 row; A11 exploits only V7, so the weight "
         "ratio gives alpha_11 = 7.0/390 * 0.0318 = 0.000571 and p = 5.594e-4."},
        {"A12", 19.1e-3, Excluded,
         "Published alpha_12 = 0.019 instead of the 23.9/390 * 0.0318 = 0.00195 the "
         "weight ratio gives; p should be 1.910e-3, not 19.1e-3."},
    };
}

} // namespace riskchain
