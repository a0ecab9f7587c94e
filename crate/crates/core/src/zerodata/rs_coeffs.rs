//! Taylor coefficients of the Riemann–Siegel correction functions C₀..C₄ in
//! z = 2p − 1. Even functions (C₀, C₂, C₄) list the coefficients of z^{2k},
//! odd ones (C₁, C₃) those of z^{2k+1}.

pub(super) const C0: [f64; 22] = [
    0.3826834323650898,
    0.43724046807752043,
    0.1323765754803435,
    -0.013605026047674188,
    -0.013567621970103581,
    -0.0016237253231444653,
    0.0002970535373337969,
    7.94330087952147e-05,
    4.6556124614504504e-07,
    -1.4327251630955106e-06,
    -1.0354847112312946e-07,
    1.2357927083861738e-08,
    1.7881083857954906e-09,
    -3.391414389927036e-11,
    -1.6326633902565907e-11,
    -3.7851093185412205e-13,
    9.327423259201725e-14,
    5.221843015978137e-15,
    -3.350673072744264e-16,
    -3.4124265228117265e-17,
    5.751203341432399e-19,
    1.4895301363211506e-19,
];
pub(super) const C1: [f64; 22] = [
    -0.026825102628375348,
    0.013784773426351853,
    0.03849125048223508,
    0.009871066299062077,
    -0.0033107597608584044,
    -0.0014647808577954152,
    -1.3207940624876963e-05,
    5.9227487018471416e-05,
    5.980242585373449e-06,
    -9.641322456169826e-07,
    -1.8334733722714413e-07,
    4.4670875627178334e-09,
    2.7096350821772744e-09,
    7.785288654315851e-11,
    -2.343762601089369e-11,
    -1.5830172789987521e-12,
    1.211994157372379e-13,
    1.4583781161108306e-14,
    -2.878630525813192e-16,
    -8.662862902123724e-17,
    -8.430722727137041e-19,
    3.6308072230973464e-19,
];
pub(super) const C2: [f64; 23] = [
    0.005188542830293168,
    0.00030946583880634744,
    -0.011335941078229373,
    0.0022330457419581446,
    0.00519663740886233,
    0.0003439914407620834,
    -0.0005910648427470583,
    -0.00010229972547935857,
    2.0888392216992754e-05,
    5.927665493096536e-06,
    -1.6423838362436276e-07,
    -1.5161199700940684e-07,
    -5.907803698206668e-09,
    2.0911514859478188e-09,
    1.781564958329235e-10,
    -1.6164072455353832e-11,
    -2.3806962496667617e-12,
    5.398265295542595e-14,
    1.9750142196969516e-14,
    2.3332868732882633e-16,
    -1.118751761004808e-16,
    -4.164009488883767e-18,
    4.446081109291883e-19,
];
pub(super) const C3: [f64; 23] = [
    -0.0013397160907194568,
    0.003744215136379394,
    -0.0013303178919321468,
    -0.0022654660765471786,
    0.0009548499998506731,
    0.0006010038458963604,
    -0.00010128858286776622,
    -6.865733449299826e-05,
    5.985366791538599e-07,
    3.331659851239947e-06,
    2.1919289102435082e-07,
    -7.890884245681494e-08,
    -9.414685081295262e-09,
    9.57011621088348e-10,
    1.8763137453470662e-10,
    -4.4378376793233995e-12,
    -2.242673850561735e-12,
    -3.6276868657352434e-14,
    1.7639809550821582e-14,
    7.960765246786778e-16,
    -9.419651490589691e-17,
    -7.133103854569658e-18,
    3.2899105845546245e-19,
];
pub(super) const C4: [f64; 24] = [
    0.00046483389361763383,
    -0.001005660736534047,
    0.00024044856573725794,
    0.0010283086149702322,
    -0.0007657861071755644,
    -0.00020365286803084818,
    0.0002321229049106873,
    3.2602144243865195e-05,
    -2.5579062517949524e-05,
    -4.107464438915745e-06,
    1.1781113640371294e-06,
    2.445656142248458e-07,
    -2.3915824767344323e-08,
    -7.505214207035756e-09,
    1.3312279416258429e-10,
    1.344062675422562e-10,
    3.513770042430486e-12,
    -1.519154453370392e-12,
    -8.915417681447087e-14,
    1.1195891165228536e-14,
    1.0516013329914816e-15,
    -5.1786552736466835e-17,
    -8.065874861916566e-18,
    1.0608204530563966e-19,
];
