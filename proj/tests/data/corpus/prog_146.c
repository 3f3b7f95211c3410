#include <stdio.h>
typedef struct {
    double y;
    double x;
} Entry;
double helper(Entry val)
{
    double sum = val.y * val.x;
    return sum;
}
void check(Entry *val, double tmp)
{
    val->y = val->y * tmp;
    val->x = val->x * tmp;
}
int main(void)
{
    Entry val;
    double tmp = 3.5;
    val.y = 3.0;
    val.x = 9.0;
    check(&val, tmp);
    printf("%f\n", helper(val));
    return 0;
}
