"""J_n(x) and Y_n(x) at 30 significant digits.

Frozen output of mpmath.besselj / mpmath.bessely at 40-digit working precision.
"""

VALUES = [
    (0, 1.0, "7.65197686557966551449717526103e-1", "8.82569642156769579829267660235e-2"),
    (1, 1.0, "4.40050585744933515959682203719e-1", "-7.81212821300288716547150000048e-1"),
    (0, 0.1, "9.97501562066040032004077942484e-1", "-1.53423865135036680826801785702"),
    (2, 5.5, "-1.17315481647287475968670775606e-1", "3.30841233261405722533985152828e-1"),
    (5, 3.25, "5.99038880985604253999286286702e-2", "-1.44981573891426440876969360704"),
    (10, 20.0, "1.86482558023945083214108264512e-1", "-4.38946535156583948993654361764e-2"),
    (17, 0.5, "1.63081060699529613088654948065e-25", "-1.14864613992904707778769838246e+23"),
    (30, 50.0, "4.84342572455094174854789818027e-2", "-1.16457234935441447700755320566e-1"),
    (0, 50.0, "5.58123276692518150047504785294e-2", "-9.80649954700770790292114534404e-2"),
    (30, 12.5, "7.83663112633011714346754102311e-10", "-1.48965291328190634855517451558e+7"),
    (3, 0.75, "8.48438342327410884392755236884e-3", "-1.29877176234475433186319774485e+1"),
    (25, 40.0, "-2.63603411759185070349979659438e-2", "1.4026971952776406320366080475e-1"),
]
