#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "satphase/bounds.hpp"

using namespace satphase;

TEST(Qcrb, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(qcrb(20, 10.0), 0.0025);
    EXPECT_DOUBLE_EQ(qcrb(100, 10.0), 0.0005);
    EXPECT_THROW(qcrb(0, 10.0), DomainError);
}

TEST(Qcrb, FisherRouteAgreesWithClosedForm) {
    for (double a2 : {0.5, 1.0, 10.0, 123.4}) {
        for (std::size_t n : {1u, 20u, 40u, 100u}) {
            for (double phase : {0.0, 0.7, -2.5}) {
                PhaseEstimationSetting s{a2, n, phase};
                const double fisher = qcrb_from_fisher(s, GaussianState::coherent(a2, phase));
                EXPECT_NEAR(fisher / qcrb(n, a2), 1.0, 1e-12);
            }
        }
    }
}

TEST(Qcrb, FisherInformationOfCoherentState) {
    const PhaseEstimationSetting s{10.0, 1, 0.3};
    EXPECT_NEAR(quantum_fisher_info(s, GaussianState::coherent(10.0, 0.3)), 20.0, 1e-12);
}

TEST(Qcrb, SingularCovarianceIsNumericalError) {
    GaussianState st = GaussianState::coherent(10.0, 0.0);
    st.covariance.setZero();
    EXPECT_THROW(quantum_fisher_info(PhaseEstimationSetting{}, st), NumericalError);
}

TEST(Qcrb, DecreasingCurveAndCsv) {
    const std::vector<std::size_t> ns = {20, 40, 60, 80, 100};
    const auto curve = qcrb_curve(ns, 10.0);
    ASSERT_EQ(curve.size(), ns.size());
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LT(curve[i].second, curve[i - 1].second);
    std::ostringstream os;
    write_qcrb_csv(os, curve);
    EXPECT_EQ(os.str().substr(0, 23), "n_measurements,qcrb\n20,");
}
