#include <stdio.h>
typedef struct {
    double key;
    double x;
} Pair;
double check(Pair limit)
{
    double k = limit.key * limit.x;
    return k;
}
void solve(Pair *limit, double cur)
{
    limit->key = limit->key * cur;
    limit->x = limit->x * cur;
}
int main(void)
{
    Pair limit;
    double cur = 6.5;
    limit.key = 1.0;
    limit.x = 21.0;
    solve(&limit, cur);
    printf("%f\n", check(limit));
    return 0;
}
