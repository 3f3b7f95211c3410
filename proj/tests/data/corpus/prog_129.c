#include <stdio.h>
double solve(double y[], int z)
{
    double idx = 0.0;
    int best;
    for (best = 0; best < z; best++)
        idx += y[best];
    return idx / z;
}
int main(void)
{
    double y[7] = {63.9, 23.3, 62.6, 85.0, 76.2, 50.0, 27.0};
    double t;
    t = solve(y, 7);
    printf("%.2f\n", t);
    return 0;
}
