"""Frozen representatives of a few classes (drawn once from the default box)."""
from seasonlv import ModelParams

RAW = {
    1: {'omega': 8.194855946063473, 'phi': 0.6580934200224712,
        'mu': [0.19640734478722516, 0.14285476012348863, 0.24922650519177586],
        'b': [0.4224331197936122, 0.8999662721009791, 0.3705258765871742],
        'a': [[0.31053275404251646, 0.8168228871444654, 0.3049470596762295],
              [0.3046597260892478, 0.11733769501864895, 0.49384837313407387],
              [0.30099516794344505, 0.8944949361299177, 0.322002396915484]]},
    19: {'omega': 4.662470017845658, 'phi': 0.5093322133891962,
         'mu': [0.0812707468498386, 0.10111311866028862, 0.26831911767357514],
         'b': [0.6473843574287625, 0.3263290403588224, 0.9037657220041675],
         'a': [[0.45753728045577746, 0.8083075581003166, 0.42443872532877147],
               [0.9888427113433496, 0.35011925951275785, 0.06473280702553356],
               [0.1861985385416821, 0.36730945129873344, 0.8501618655671002]]},
    20: {'omega': 4.679723136249808, 'phi': 0.6642076649404346,
         'mu': [0.4546457064174149, 0.47677917016203153, 0.1258913162496676],
         'b': [0.35108564693445576, 0.4961028397271016, 0.3004835007912281],
         'a': [[0.21105371617390972, 0.4018640659409565, 0.9277387190748927],
               [0.5118164392745506, 0.6533132804972607, 0.5935960855541933],
               [0.5035611459708196, 0.21275425532061343, 0.31388681085645836]]},
    33: {'omega': 7.187949375395542, 'phi': 0.8882419530622041,
         'mu': [0.34863441580301185, 0.3395506085578404, 0.303596928951517],
         'b': [0.2675794419803585, 0.5082056024638626, 0.5780060510074297],
         'a': [[0.9216109229749725, 0.3251565331986288, 0.10074918943263823],
               [0.1583884787214185, 0.9334775858446182, 0.3097796845431763],
               [0.5412870061328079, 0.21594163606708483, 0.40823448577414007]]},
}


def rep(class_id: int) -> ModelParams:
    return ModelParams(**RAW[class_id])
